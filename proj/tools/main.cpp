#include "wicbr/commands.hpp"

int main(int argc, char** argv) { return wicbr::cli::run(argc, argv); }
