#include "cli.hpp"

int main(int argc, char** argv) { return kgwalk::cli::run_cli(argc, argv); }
