#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "resetopt/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        const resetopt::RunConfig cfg = resetopt::parse(args);
        return resetopt::run(cfg);
    } catch (const resetopt::UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n"
                  << "usage: resetopt <boundary|price|parity|verify-lattice|verify-mc|figure>"
                     " [--flag value ...] [--config file]\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
