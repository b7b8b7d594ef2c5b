#include <iostream>
#include <string>
#include <vector>

#include "eldnn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty()) {
        std::cerr << "usage: eldnn <train|eval|gap|verify|sweep-lambda> --config PATH"
                     " [--seed N] [--out DIR]\n";
        return 2;
    }
    return eldnn::cli::run(args, std::cout, std::cerr);
}
