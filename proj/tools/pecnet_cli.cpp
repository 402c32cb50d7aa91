#include "pecnet/cli.hpp"

int main(int argc, char** argv) { return pecnet::cli::run_cli(argc, argv); }
