#include <string>
#include <vector>

#include "dwell/cli.hpp"

int main(int argc, char** argv) { return dwell::cli::main_entry(std::vector<std::string>(argv + 1, argv + argc)); }
