// Acceptance runner: one line per criterion, exit 0 only if every criterion
// in the chosen suite passes.  Usage: acceptance_tests [suite-id]
#include <exception>
#include <iostream>
#include <string>

#include "fulfill/accept.hpp"

int main(int argc, char** argv) {
  std::string suite = argc > 1 ? argv[1] : "all";
  try {
    fulfill::AcceptanceReport report = fulfill::run_acceptance(suite, &std::cout);
    std::cout << (report.pass ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL") << " ("
              << report.suite << ")" << std::endl;
    return report.pass ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
