#include "commands.hpp"

int main(int argc, char** argv) { return statrcm::cli::run(argc, argv); }
