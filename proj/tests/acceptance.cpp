// Acceptance suite: runs every criterion on the full grid against the Fock
// oracle and prints one pass/fail line per criterion.  Exit code 0 only when
// all criteria hold at their stated tolerances.

#include <cstdio>
#include <iostream>

#include "pascs/verify.hpp"

int main(int argc, char** argv) {
  pascs::verify::VerifyOptions opts;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--quick") opts.quick = true;
  }
  pascs::verify::VerifyReport report;
  try {
    report = pascs::verify::run_verify(opts);
  } catch (const std::exception& e) {
    std::cerr << "acceptance suite aborted: " << e.what() << "\n";
    return 2;
  }

  for (const auto& check : report.checks) {
    std::printf("[%s] criterion %2d: %s (%.1f s)\n", check.pass ? "PASS" : "FAIL",
                check.criterion, check.name.c_str(), check.seconds);
    for (const auto& dev : check.deviations) {
      if (dev.tolerance > 0.0)
        std::printf("        %-42s max_abs=%.3e max_rel=%.3e tol=%.0e %s\n",
                    dev.quantity.c_str(), dev.max_abs, dev.max_rel, dev.tolerance,
                    dev.pass ? "ok" : "VIOLATED");
      else
        std::printf("        %-42s %s\n", dev.quantity.c_str(), dev.pass ? "ok" : "VIOLATED");
      if (!dev.pass && !dev.worst_case.empty())
        std::printf("            worst: %s\n", dev.worst_case.c_str());
    }
    for (const auto& note : check.notes) std::printf("        note: %s\n", note.c_str());
  }
  std::printf("\nadjudicated conventions:\n");
  for (const auto& [name, detail] : report.adjudications)
    std::printf("    %s: %s\n", name.c_str(), detail.c_str());
  std::printf("\noverall: %s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? 0 : 1;
}
