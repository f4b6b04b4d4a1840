#include "ract/commands.hpp"

int main(int argc, char** argv) { return ract::cli::run_cli(argc, argv); }
