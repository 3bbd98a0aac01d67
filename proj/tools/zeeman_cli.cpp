#include "zeeman/cli/commands.hpp"

int main(int argc, char** argv) { return zeeman::cli::cli_main(argc, argv); }
