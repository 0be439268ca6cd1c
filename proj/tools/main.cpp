#include "bimult/cli.hpp"

int main(int argc, char** argv) { return bimult::cli::run(argc, argv); }
