// Line-oriented proof scripts: a theory declaration, a goal, one kernel
// step per line (indices refer strictly backward), and a final qed that
// must match the goal. Steps may be scoped to a world of a combined
// theory with a leading @w0 / @w1.

#ifndef DYNTH_SCRIPT_HPP_
#define DYNTH_SCRIPT_HPP_

#include <optional>
#include <string>
#include <vector>

#include "dynth/kernel.hpp"
#include "dynth/oracle.hpp"

namespace dynth {

struct StepRecord {
  int index = 0;
  std::string op;
  TheoryPtr theory;  // the theory the theorem belongs to
  Theorem thm;
};

struct GammaStatus {
  Formula formula;
  bool screened = false;   // no counterexample within the budget
  std::string detail;      // counterexample description when refuted
};

struct ScriptResult {
  bool success = false;
  std::string error;
  int errorLine = 0;
  TheoryPtr theory;  // the script's (top) theory
  std::optional<Theorem> finalTheorem;
  std::vector<StepRecord> steps;
  std::vector<GammaStatus> gammaStatus;
  std::string transcript;

  bool gammaFullyScreened() const {
    for (const auto& g : gammaStatus)
      if (!g.screened) return false;
    return true;
  }
};

ScriptResult runScriptText(const std::string& text, const EvalBudget& budget);
ScriptResult runScriptFile(const std::string& path, const EvalBudget& budget);

// The step commands the script parser accepts, with their argument
// synopses. The CLI manual is printed from this table, so the docs cannot
// drift from the parser.
struct StepDoc {
  const char* name;
  const char* synopsis;
};
const std::vector<StepDoc>& scriptStepTable();

}  // namespace dynth

#endif  // DYNTH_SCRIPT_HPP_
