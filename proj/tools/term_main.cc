#include <iostream>

#include "term/cli.h"

int main(int argc, char** argv) { return term::dispatch(argc, argv, std::cout, std::cerr); }
