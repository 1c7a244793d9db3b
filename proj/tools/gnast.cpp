#include "gnast/cli.hpp"

int main(int argc, char** argv) { return gnast::cli::run_command(argc, argv); }
