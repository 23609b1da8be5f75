#include <string>
#include <vector>

#include "nlqs/cli.hpp"

int main(int argc, char** argv) { return nlqs::cli::run(std::vector<std::string>(argv, argv + argc)); }
