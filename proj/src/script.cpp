#include "dynth/script.hpp"

#include <fstream>
#include <sstream>

#include "dynth/hetero.hpp"
#include "dynth/instance_calculus.hpp"
#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"

namespace dynth {

const std::vector<StepDoc>& scriptStepTable() {
  static const std::vector<StepDoc> table = {
      {"theory", "theory <name> = <decl>"},
      {"goal", "goal \"<formula>\""},
      {"fresh", "fresh <var>"},
      {"assume", "assume \"<modality-free formula>\""},
      {"taut", "taut \"<formula>\""},
      {"mp", "mp <i> <j>"},
      {"G", "G <i> \"<program>\""},
      {"axK", "axK \"<program>\" \"<f>\" \"<g>\""},
      {"axV", "axV \"<program>\" \"<f>\""},
      {"axB", "axB \"<program>\" <var> \"<f>\""},
      {"havoc", "havoc <var> \"<f>\""},
      {"test", "test \"<guard>\" \"<f>\""},
      {"seq", "seq \"<p>\" \"<q>\" \"<f>\""},
      {"choice", "choice \"<p>\" \"<q>\" \"<f>\""},
      {"star", "star \"<p>\" \"<f>\""},
      {"I", "I \"<p>\" \"<f>\""},
      {"C", "C \"<p>\" \"<f>\" <counter> <helper>"},
      {"HR", "HR <i>"},
      {"RR", "RR <i>"},
      {"HR0", "HR0 <i>"},
      {"HR1", "HR1 <i>"},
      {"M", "M <i> \"<program>\""},
      {"MR", "MR <i> <j>"},
      {"boxAnd", "boxAnd \"<program>\" \"<f>\" \"<g>\""},
      {"KDia", "KDia \"<program>\" \"<f>\" \"<g>\""},
      {"MPDia", "MPDia \"<program>\" \"<psi>\" \"<phi>\" <var>..."},
      {"PB", "PB \"<program>\" \"<phi>\" \"<psi>\" \"<xi>\""},
      {"ind", "ind <i>"},
      {"Fi", "Fi <world> \"<program>\" \"<psi>\" \"<xi>\" \"<frame>\""},
      {"ghost", "ghost <ghost-var> <anchor-var> \"<f>\""},
      {"inst", "inst <i> <bound-var> <replacement>"},
      {"fainst", "fainst <bound-var> <replacement> \"<f>\""},
      {"gen", "gen <i> <var>"},
      {"qdist", "qdist <var> \"<f>\" \"<g>\""},
      {"vac", "vac <var> \"<f>\""},
      {"ideq", "ideq <var>"},
      {"assign", "assign \"<v := t>\" \"<f>\""},
      {"decide", "decide \"<formula>\""},
      {"chain", "chain <i> <j>"},
      {"iffdir", "iffdir <i> <0|1>"},
      {"boxcong", "boxcong <i> \"<program>\""},
      {"tautfrom", "tautfrom <i>... \"<goal>\""},
      {"qed", "qed <i>"},
  };
  return table;
}

namespace {

struct ScriptError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One step line, split into bare words and quoted strings.
struct Args {
  std::vector<std::string> items;
  std::vector<bool> quoted;
  std::size_t next = 0;

  bool done() const { return next >= items.size(); }
  std::string take(const char* what) {
    if (done()) throw ScriptError(std::string("missing argument: ") + what);
    return items[next++];
  }
  std::string takeQuoted(const char* what) {
    if (done() || !quoted[next])
      throw ScriptError(std::string("expected a quoted argument: ") + what);
    return items[next++];
  }
  int takeIndex() {
    std::string s = take("step index");
    try {
      return std::stoi(s);
    } catch (...) {
      throw ScriptError("not a step index: " + s);
    }
  }
};

Args splitLine(const std::string& line) {
  Args a;
  std::size_t i = 0;
  while (i < line.size()) {
    if (std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
      continue;
    }
    if (line[i] == '#') break;  // comment
    if (line[i] == '"') {
      std::size_t end = line.find('"', i + 1);
      if (end == std::string::npos)
        throw ScriptError("unterminated string in script line");
      a.items.push_back(line.substr(i + 1, end - i - 1));
      a.quoted.push_back(true);
      i = end + 1;
      continue;
    }
    std::size_t end = i;
    while (end < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[end])) &&
           line[end] != '"' && line[end] != '#')
      ++end;
    a.items.push_back(line.substr(i, end - i));
    a.quoted.push_back(false);
    i = end;
  }
  return a;
}

// Peels lift wrappers off an assignment program.
std::optional<SemiringProg> peelAssign(const Theory& th, const Program& p) {
  if (const auto* rp = asRegularProg(th, p)) {
    if (rp->tag != RegularProg::Tag::Base) return std::nullopt;
    return peelAssign(*th.base(), rp->basePgm);
  }
  if (const auto* hp = asHavocProg(th, p)) {
    if (hp->isHavoc) return std::nullopt;
    return peelAssign(*th.base(), hp->basePgm);
  }
  if (const auto* sp = p.as<SemiringProg>()) return *sp;
  return std::nullopt;
}

class ScriptRunner {
 public:
  ScriptRunner(const std::string& text, const EvalBudget& budget)
      : text_(text), budget_(budget) {}

  ScriptResult run() {
    ScriptResult res;
    std::istringstream in(text_);
    std::string line;
    int lineNo = 0;
    try {
      while (std::getline(in, line)) {
        ++lineNo;
        curLine_ = lineNo;
        Args args = splitLine(line);
        if (args.items.empty()) continue;
        handleLine(args, line, res);
        if (qedDone_) break;
      }
      if (!theory_) throw ScriptError("script declares no theory");
      if (!goal_.valid()) throw ScriptError("script declares no goal");
      if (!qedDone_) throw ScriptError("script has no qed step");
    } catch (const std::exception& e) {
      res.success = false;
      res.error = e.what();
      res.errorLine = curLine_;
      res.theory = theory_;
      res.transcript = transcript_.str();
      return res;
    }
    res.success = true;
    res.theory = theory_;
    res.finalTheorem = steps_[qedIndex_ - 1].thm;
    res.steps = steps_;
    // screen the gamma of the final theorem
    for (const Formula& g : res.finalTheorem->gamma()) {
      GammaStatus gs;
      gs.formula = g;
      auto ce = falsify(*theory_, g, budget_);
      gs.screened = !ce.has_value();
      if (ce) {
        gs.detail = "counterexample at " + ce->state.str();
        for (const auto& t : ce->trace) gs.detail += "\n      " + t;
      }
      res.gammaStatus.push_back(std::move(gs));
      transcript_ << "gamma: " << printFormula(g, *theory_) << "  ["
                  << (gs.screened ? "screened" : "REFUTED") << "]\n";
    }
    res.transcript = transcript_.str();
    return res;
  }

 private:
  void handleLine(Args& args, const std::string& rawLine, ScriptResult& res) {
    std::string op = args.take("step");
    if (op == "theory") {
      args.take("theory name");
      std::size_t eq = rawLine.find('=');
      if (eq == std::string::npos)
        throw ScriptError("theory line must read: theory <name> = <decl>");
      Lexer lx(rawLine.substr(eq + 1));
      theory_ = parseTheoryDecl(lx);
      ct_ = combinedOf(*theory_);
      transcript_ << "theory: " << theory_->describe() << "\n";
      return;
    }
    if (op == "goal") {
      requireTheory();
      goal_ = parseFormula(args.takeQuoted("goal formula"), *theory_);
      transcript_ << "goal: " << printFormula(goal_, *theory_) << "\n";
      return;
    }
    if (op == "fresh") {
      requireTheory();
      std::string name = args.take("variable");
      if (goal_.valid() &&
          fvSyn(*theory_, goal_).contains(theory_->internVar(name)))
        throw ScriptError("fresh variable " + name + " occurs in the goal");
      return;
    }
    if (op == "qed") {
      requireTheory();
      int i = args.takeIndex();
      const StepRecord& st = at(i);
      if (st.theory->id() != theory_->id())
        throw ScriptError("qed: step " + std::to_string(i) +
                          " lives in a sub-theory, not the script theory");
      if (!st.thm.conclusion().structurallyEqual(goal_))
        throw ScriptError(
            "qed: conclusion of step " + std::to_string(i) +
            " does not match the goal:\n  step: " +
            printFormula(st.thm.conclusion(), *theory_) +
            "\n  goal: " + printFormula(goal_, *theory_));
      qedDone_ = true;
      qedIndex_ = i;
      transcript_ << "qed " << i << "\n";
      (void)res;
      return;
    }

    requireTheory();
    // world scoping
    TheoryPtr stepTheory = theory_;
    Theory::IdentMapper printMapper;
    if (op == "@w0" || op == "@w1") {
      if (!ct_) throw ScriptError(op + ": theory is not a combination");
      int w = op == "@w0" ? 0 : 1;
      stepTheory = ct_->world(w)->shared_from_this();
      std::string prefix = ct_->prefix(w);
      worldPrefix_ = prefix;
      printMapper = [prefix](const std::string& n) { return prefix + n; };
      op = args.take("step");
    } else {
      worldPrefix_.clear();
    }

    Theorem thm = applyStep(*stepTheory, op, args);
    StepRecord rec{static_cast<int>(steps_.size()) + 1, op, stepTheory, thm};
    steps_.push_back(rec);
    transcript_ << rec.index << ". " << op << ": "
                << printFormula(thm.conclusion(), *stepTheory, printMapper);
    if (!thm.gamma().empty())
      transcript_ << "   [gamma " << thm.gamma().size() << "]";
    transcript_ << "\n";
  }

  // Parses formula/program/variable text in the current step's theory,
  // stripping the world prefix for world-scoped steps.
  Formula parseF(const Theory& th, const std::string& text) {
    Lexer lx(text);
    setupTransform(lx);
    Formula f = parseFormula(lx, th);
    if (!lx.atEnd()) lx.fail("unexpected trailing input after formula");
    checkWellFormed(th, f);
    return f;
  }
  Program parseP(const Theory& th, const std::string& text) {
    Lexer lx(text);
    setupTransform(lx);
    Program p = parseProgram(lx, th);
    if (!lx.atEnd()) lx.fail("unexpected trailing input after program");
    return p;
  }
  VarId parseVar(const Theory& th, const std::string& name) {
    std::string n = name;
    if (!worldPrefix_.empty()) {
      if (n.rfind(worldPrefix_, 0) != 0)
        throw ScriptError("variable " + n + " is not in world prefixed '" +
                          worldPrefix_ + "'");
      n = n.substr(worldPrefix_.size());
    }
    return th.internVar(n);
  }
  void setupTransform(Lexer& lx) {
    if (worldPrefix_.empty()) return;
    std::string prefix = worldPrefix_;
    lx.identTransform = [prefix, &lx](const std::string& n) {
      if (n.rfind(prefix, 0) != 0)
        lx.fail("identifier '" + n + "' is not in world prefixed '" + prefix +
                "'");
      return n.substr(prefix.size());
    };
  }

  Theorem applyStep(const Theory& th, const std::string& op, Args& args) {
    using namespace kernel;
    if (op == "assume") return assume(th, parseF(th, args.takeQuoted("formula")));
    if (op == "taut") return taut(th, parseF(th, args.takeQuoted("formula")));
    if (op == "mp") {
      const StepRecord& a = at(args.takeIndex());
      const StepRecord& b = at(args.takeIndex());
      return mp(th, a.thm, b.thm);
    }
    if (op == "G") {
      const StepRecord& a = at(args.takeIndex());
      return ruleG(th, a.thm, parseP(th, args.takeQuoted("program")));
    }
    if (op == "axK") {
      Program p = parseP(th, args.takeQuoted("program"));
      Formula f = parseF(th, args.takeQuoted("f"));
      Formula g = parseF(th, args.takeQuoted("g"));
      return axK(th, p, f, g);
    }
    if (op == "axV") {
      Program p = parseP(th, args.takeQuoted("program"));
      return axV(th, p, parseF(th, args.takeQuoted("f")));
    }
    if (op == "axB") {
      Program p = parseP(th, args.takeQuoted("program"));
      VarId v = parseVar(th, args.take("variable"));
      return axB(th, p, v, parseF(th, args.takeQuoted("f")));
    }
    if (op == "havoc") {
      VarId v = parseVar(th, args.take("variable"));
      return axHavoc(th, v, parseF(th, args.takeQuoted("f")));
    }
    if (op == "test") {
      Formula guard = parseF(th, args.takeQuoted("guard"));
      return axTest(th, guard, parseF(th, args.takeQuoted("f")));
    }
    if (op == "seq") {
      Program p = parseP(th, args.takeQuoted("p"));
      Program q = parseP(th, args.takeQuoted("q"));
      return axSeq(th, p, q, parseF(th, args.takeQuoted("f")));
    }
    if (op == "choice") {
      Program p = parseP(th, args.takeQuoted("p"));
      Program q = parseP(th, args.takeQuoted("q"));
      return axChoice(th, p, q, parseF(th, args.takeQuoted("f")));
    }
    if (op == "star") {
      Program p = parseP(th, args.takeQuoted("p"));
      return axStar(th, p, parseF(th, args.takeQuoted("f")));
    }
    if (op == "I") {
      Program p = parseP(th, args.takeQuoted("p"));
      return axI(th, p, parseF(th, args.takeQuoted("f")));
    }
    if (op == "C") {
      Program p = parseP(th, args.takeQuoted("p"));
      Formula f = parseF(th, args.takeQuoted("f"));
      VarId v = parseVar(th, args.take("counter"));
      VarId w = parseVar(th, args.take("helper"));
      auto ind = th.inductive();
      if (!ind) throw ScriptError("C: theory is not inductively expressive");
      return axC(th, *ind, p, f, v, w);
    }
    if (op == "HR" || op == "RR" || op == "HR0" || op == "HR1") {
      const StepRecord& a = at(args.takeIndex());
      ReduceRule kind = op == "HR"    ? ReduceRule::HR
                        : op == "RR"  ? ReduceRule::RR
                        : op == "HR0" ? ReduceRule::HR0
                                      : ReduceRule::HR1;
      return ruleReduce(kind, a.thm, th);
    }
    if (op == "M") {
      const StepRecord& a = at(args.takeIndex());
      return ruleM(th, a.thm, parseP(th, args.takeQuoted("program")));
    }
    if (op == "MR") {
      const StepRecord& a = at(args.takeIndex());
      const StepRecord& b = at(args.takeIndex());
      return ruleMR(th, a.thm, b.thm);
    }
    if (op == "boxAnd") {
      Program p = parseP(th, args.takeQuoted("program"));
      Formula f = parseF(th, args.takeQuoted("f"));
      Formula g = parseF(th, args.takeQuoted("g"));
      return axBoxAnd(th, p, f, g);
    }
    if (op == "KDia") {
      Program p = parseP(th, args.takeQuoted("program"));
      Formula f = parseF(th, args.takeQuoted("f"));
      Formula g = parseF(th, args.takeQuoted("g"));
      return axKDia(th, p, f, g);
    }
    if (op == "MPDia") {
      Program p = parseP(th, args.takeQuoted("program"));
      Formula psi = parseF(th, args.takeQuoted("psi"));
      Formula phi = parseF(th, args.takeQuoted("phi"));
      std::vector<VarId> vec;
      while (!args.done()) vec.push_back(parseVar(th, args.take("variable")));
      return axMPDia(th, p, psi, phi, vec);
    }
    if (op == "PB") {
      Program p = parseP(th, args.takeQuoted("program"));
      Formula phi = parseF(th, args.takeQuoted("phi"));
      Formula psi = parseF(th, args.takeQuoted("psi"));
      Formula xi = parseF(th, args.takeQuoted("xi"));
      VarSetBase vecSet = th.progBv(p);
      vecSet.unite(fvSyn(th, Formula::diamond(p, phi)));
      std::vector<VarId> vecPlus =
          fvSyn(th, Formula::mkAnd(psi, xi)).minus(vecSet).items();
      return axPB(th, p, phi, psi, xi, vecSet.items(), vecPlus);
    }
    if (op == "ind") {
      const StepRecord& a = at(args.takeIndex());
      return ruleInd(th, a.thm);
    }
    if (op == "Fi") {
      int i = std::stoi(args.take("world index"));
      Program alpha = parseP(th, args.takeQuoted("program"));
      Formula psi = parseF(th, args.takeQuoted("psi"));
      Formula xi = parseF(th, args.takeQuoted("xi"));
      Formula frame = parseF(th, args.takeQuoted("frame"));
      return axFi(th, i, alpha, psi, xi, frame);
    }
    if (op == "ghost") {
      VarId v = parseVar(th, args.take("ghost variable"));
      VarId w = parseVar(th, args.take("anchor variable"));
      return axGhost(th, v, w, parseF(th, args.takeQuoted("f")));
    }
    if (op == "inst") {
      const StepRecord& a = at(args.takeIndex());
      VarId v = parseVar(th, args.take("bound variable"));
      VarId w = parseVar(th, args.take("replacement"));
      return instThm(th, a.thm, v, w);
    }
    if (op == "fainst") {
      VarId v = parseVar(th, args.take("bound variable"));
      VarId w = parseVar(th, args.take("replacement"));
      return axForallElim(th, v, w, parseF(th, args.takeQuoted("f")));
    }
    if (op == "gen") {
      const StepRecord& a = at(args.takeIndex());
      return gen(th, a.thm, parseVar(th, args.take("variable")));
    }
    if (op == "qdist") {
      VarId v = parseVar(th, args.take("variable"));
      Formula f = parseF(th, args.takeQuoted("f"));
      Formula g = parseF(th, args.takeQuoted("g"));
      return axQDist(th, v, f, g);
    }
    if (op == "vac") {
      VarId v = parseVar(th, args.take("variable"));
      return axVacuous(th, v, parseF(th, args.takeQuoted("f")));
    }
    if (op == "ideq") return axIdentityEq(th, parseVar(th, args.take("variable")));
    if (op == "assign") {
      Program p = parseP(th, args.takeQuoted("assignment"));
      auto asg = peelAssign(th, p);
      if (!asg) throw ScriptError("assign: program is not an assignment");
      return axAssign(th, asg->target, asg->rhs,
                      parseF(th, args.takeQuoted("f")));
    }
    if (op == "decide")
      return finiteValid(th, parseF(th, args.takeQuoted("formula")));
    if (op == "chain") {
      const StepRecord& a = at(args.takeIndex());
      const StepRecord& b = at(args.takeIndex());
      return chainImp(th, a.thm, b.thm);
    }
    if (op == "tautfrom") {
      // goal as a propositional consequence of earlier steps: builds the
      // tautology (c1 -> (c2 -> ... -> goal)) and discharges it by mp
      std::vector<int> premises;
      while (!args.done() && !args.quoted[args.next])
        premises.push_back(args.takeIndex());
      Formula goal = parseF(th, args.takeQuoted("goal"));
      Formula schema = goal;
      for (auto it = premises.rbegin(); it != premises.rend(); ++it)
        schema = Formula::implies(at(*it).thm.conclusion(), schema);
      Theorem acc = taut(th, schema);
      for (int i : premises) acc = mp(th, acc, at(i).thm);
      return acc;
    }
    if (op == "iffdir") {
      const StepRecord& a = at(args.takeIndex());
      return iffDir(th, a.thm, args.takeIndex());
    }
    if (op == "boxcong") {
      const StepRecord& a = at(args.takeIndex());
      return boxCongruence(th, parseP(th, args.takeQuoted("program")), a.thm);
    }
    std::string known;
    for (const StepDoc& d : scriptStepTable()) known += std::string(" ") + d.name;
    throw ScriptError("unknown step '" + op + "' (known steps:" + known + ")");
  }

  const StepRecord& at(int i) {
    if (i < 1 || i > static_cast<int>(steps_.size()))
      throw ScriptError("step index " + std::to_string(i) +
                        " does not refer backward");
    return steps_[i - 1];
  }

  void requireTheory() {
    if (!theory_) throw ScriptError("no theory declared yet");
  }

  std::string text_;
  EvalBudget budget_;
  TheoryPtr theory_;
  const CombinedTheory* ct_ = nullptr;
  Formula goal_;
  std::vector<StepRecord> steps_;
  std::ostringstream transcript_;
  bool qedDone_ = false;
  int qedIndex_ = 0;
  int curLine_ = 0;
  std::string worldPrefix_;
};

}  // namespace

ScriptResult runScriptText(const std::string& text, const EvalBudget& budget) {
  return ScriptRunner(text, budget).run();
}

ScriptResult runScriptFile(const std::string& path, const EvalBudget& budget) {
  std::ifstream in(path);
  if (!in) {
    ScriptResult res;
    res.error = "cannot read script file: " + path;
    return res;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return runScriptText(buf.str(), budget);
}

}  // namespace dynth
