#include "commands.hpp"

int main(int argc, char** argv) { return xover::cli::run_cli(argc, argv); }
