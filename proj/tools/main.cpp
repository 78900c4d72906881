#include "cli.hpp"

int main(int argc, char **argv) { return dhogm::cli::run_cli(argc, argv); }
