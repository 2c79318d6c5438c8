#include "cli_app.hpp"

int main(int argc, char** argv) { return softcell::cli::run_cli(argc, argv); }
