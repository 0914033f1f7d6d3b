#include "commands.hpp"

int main(int argc, char** argv) { return ldem::cli::run_cli(argc, argv); }
