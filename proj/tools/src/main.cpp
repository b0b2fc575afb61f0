#include "daxs_tools/commands.hpp"

int main(int argc, char** argv) { return daxs::tools::run_cli(argc, argv); }
