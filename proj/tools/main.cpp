#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) { return hyqmom::app::main(argc, argv, std::cout, std::cerr); }
