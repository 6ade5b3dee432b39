#include "dynth/theory.hpp"

#include <algorithm>
#include <sstream>

namespace dynth {

namespace {
std::atomic<TheoryId> g_nextTheoryId{1};
}

Theory::Theory() : id_(g_nextTheoryId.fetch_add(1)) {}

const char* verdictName(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    case Verdict::Unknown:
      return "unknown";
  }
  return "?";
}

std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::vector<State> Theory::enumerateStates() const {
  if (!finiteEnumerable())
    throw TheoryError("enumerateStates: theory " + describe() +
                      " is not finite-enumerable");
  EvalBudget b;
  std::vector<State> acc{initialState()};
  for (VarId v : varPool()) {
    std::vector<State> next;
    for (const State& s : acc)
      for (Value val : valueWindow(v, b)) next.push_back(s.with(v, val));
    acc = std::move(next);
  }
  std::sort(acc.begin(), acc.end());
  acc.erase(std::unique(acc.begin(), acc.end()), acc.end());
  return acc;
}

State Theory::sampleState(Rng& rng, const EvalBudget& b) const {
  State s = initialState();
  for (VarId v : varPool()) {
    if (rng.chance(0.2)) continue;  // leave at default now and then
    auto win = valueWindow(v, b);
    if (!win.empty()) s.set(v, win[rng.next() % win.size()]);
  }
  return s;
}

void Theory::printValue(std::ostream& os, VarId, Value val) const { os << val; }

// --- evaluation ------------------------------------------------------------

namespace {

Verdict evalRec(const Theory& th, const State& s, const Formula& f,
                const EvalBudget& b) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return th.atomEval(s, f.atomPayload()) ? Verdict::True : Verdict::False;
    case Formula::Kind::Not:
      return verdictNot(evalRec(th, s, f.child(), b));
    case Formula::Kind::And: {
      Verdict l = evalRec(th, s, f.left(), b);
      if (l == Verdict::False) return Verdict::False;
      return verdictAnd(l, evalRec(th, s, f.right(), b));
    }
    case Formula::Kind::Forall: {
      VarId v = f.boundVar();
      auto window = th.valueWindow(v, b);
      bool truncated = !th.windowExhaustive(v, b);
      if (static_cast<int>(window.size()) > b.quantCap) {
        window.resize(b.quantCap);
        truncated = true;
      }
      Verdict acc = Verdict::True;
      for (Value val : window) {
        Verdict r = evalRec(th, s.with(v, val), f.child(), b);
        if (r == Verdict::False) return Verdict::False;
        acc = verdictAnd(acc, r);
      }
      if (truncated && acc == Verdict::True) return Verdict::Unknown;
      return acc;
    }
    case Formula::Kind::Box: {
      SuccessorSet succ = th.progSucc(s, f.program(), b);
      Verdict acc = Verdict::True;
      for (const State& t : succ.states) {
        Verdict r = evalRec(th, t, f.child(), b);
        if (r == Verdict::False) return Verdict::False;
        acc = verdictAnd(acc, r);
      }
      if (succ.truncated && acc == Verdict::True) return Verdict::Unknown;
      return acc;
    }
  }
  return Verdict::Unknown;
}

}  // namespace

Verdict evalFormula(const Theory& th, const State& s, const Formula& f,
                    const EvalBudget& b) {
  if (b.quantCap < 1 || b.starDepth < 0)
    throw TheoryError("evalFormula: empty budget");
  checkWellFormed(th, f);
  return evalRec(th, s, f, b);
}

bool equalOn(const Theory&, const State& mu, const State& nu,
             const VarSet& vars) {
  return mu.equalOn(nu, vars);
}

VarSetBase fvSyn(const Theory& th, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      return th.atomFv(f.atomPayload());
    case Formula::Kind::Not:
      return fvSyn(th, f.child());
    case Formula::Kind::And: {
      VarSetBase r = fvSyn(th, f.left());
      r.unite(fvSyn(th, f.right()));
      return r;
    }
    case Formula::Kind::Forall: {
      VarSetBase r = fvSyn(th, f.child());
      r.erase(f.boundVar());
      return r;
    }
    case Formula::Kind::Box: {
      VarSetBase r = th.progFv(f.program());
      r.unite(fvSyn(th, f.child()));
      return r;
    }
  }
  return {};
}

void checkWellFormed(const Theory& th, const Formula& f) {
  switch (f.kind()) {
    case Formula::Kind::Atom:
      if (!th.ownsAtom(f.atomPayload()))
        throw TheoryError("formula uses an atom from a foreign signature (theory " +
                          th.describe() + ")");
      return;
    case Formula::Kind::Not:
    case Formula::Kind::Forall:
      checkWellFormed(th, f.child());
      return;
    case Formula::Kind::And:
      checkWellFormed(th, f.left());
      checkWellFormed(th, f.right());
      return;
    case Formula::Kind::Box:
      if (!th.ownsProgram(f.program()))
        throw TheoryError(
            "formula uses a program from a foreign signature (theory " +
            th.describe() + ")");
      checkWellFormed(th, f.child());
      return;
  }
}

bool isValidExhaustive(const Theory& th, const Formula& f) {
  if (!th.finiteEnumerable())
    throw TheoryError("isValidExhaustive requires a finite-enumerable theory");
  EvalBudget b;
  b.quantCap = 1 << 20;
  b.starDepth = 1 << 20;
  for (const State& s : th.enumerateStates())
    if (evalFormula(th, s, f, b) != Verdict::True) return false;
  return true;
}

// --- law audit ---------------------------------------------------------------

namespace {

std::string atomStr(const Theory& th, const Atom& a) {
  std::ostringstream os;
  th.printAtom(os, a);
  return os.str();
}

std::string progStr(const Theory& th, const Program& p) {
  std::ostringstream os;
  th.printProgram(os, p);
  return os.str();
}

// Randomize the variables of `s` outside `keep`.
State scramble(const Theory& th, const State& s, const VarSetBase& keep,
               Rng& rng, const EvalBudget& b) {
  State r = s;
  for (VarId v : th.varPool()) {
    if (keep.contains(v)) continue;
    auto win = th.valueWindow(v, b);
    if (!win.empty()) r.set(v, win[rng.next() % win.size()]);
  }
  return r;
}

}  // namespace

std::string LawReport::str() const {
  std::ostringstream os;
  os << "law audit: " << trials << " trials; interpolation "
     << interpolationChecks << ", atom-fv " << atomFvChecks
     << ", extensionality " << extensionalityChecks << ", program-fv "
     << progFvChecks << ", bounded-effect " << boundedEffectChecks
     << "; failures " << failures.size();
  for (const auto& f : failures) os << "\n  [" << f.law << "] " << f.detail;
  return os.str();
}

LawReport checkTheoryLaws(const Theory& th, int trials, std::uint64_t seed,
                          const EvalBudget& b) {
  if (trials < 1) throw TheoryError("checkTheoryLaws: trials must be >= 1");
  LawReport rep;
  rep.trials = trials;
  auto pool = th.varPool();
  for (int t = 0; t < trials; ++t) {
    Rng rng(mixSeed(seed, t));
    State mu = th.sampleState(rng, b);
    State nu = th.sampleState(rng, b);

    // Interpolation: the mixed state agrees with mu on V and nu elsewhere.
    {
      VarSetBase v;
      for (VarId x : pool)
        if (rng.chance(0.5)) v.insert(x);
      State omega = nu;
      for (VarId x : v) omega.set(x, mu.get(x));
      bool ok = omega.equalOn(mu, v) && omega.equalOnComplement(nu, v);
      ++rep.interpolationChecks;
      if (!ok)
        rep.failures.push_back({"interpolation", "mu=" + mu.str() +
                                                     " nu=" + nu.str() +
                                                     " V=" + v.str()});
    }

    // Atom coincidence: states agreeing on atomFv(a) evaluate a equally.
    {
      Atom a = th.sampleAtom(rng);
      VarSetBase fv = th.atomFv(a);
      State nu2 = scramble(th, mu, fv, rng, b);
      ++rep.atomFvChecks;
      if (th.atomEval(mu, a) != th.atomEval(nu2, a))
        rep.failures.push_back(
            {"atom-fv coincidence", "atom " + atomStr(th, a) + " mu=" +
                                        mu.str() + " nu=" + nu2.str()});
    }

    Program p = th.sampleProgram(rng, 2);

    // Extensionality: equal states have identical successor sets.
    {
      State copy = mu;
      auto s1 = th.progSucc(mu, p, b);
      auto s2 = th.progSucc(copy, p, b);
      std::sort(s1.states.begin(), s1.states.end());
      std::sort(s2.states.begin(), s2.states.end());
      ++rep.extensionalityChecks;
      if (s1.states != s2.states)
        rep.failures.push_back(
            {"extensionality", "program " + progStr(th, p) + " at " + mu.str()});
    }

    // Program coincidence: for V containing progFv(p), matching runs exist
    // from states equal on V, with results equal on V.
    {
      VarSetBase fv = th.progFv(p);
      VarSetBase v = fv;
      for (VarId x : pool)
        if (rng.chance(0.3)) v.insert(x);
      State nu2 = scramble(th, mu, v, rng, b);
      auto sMu = th.progSucc(mu, p, b);
      auto sNu = th.progSucc(nu2, p, b);
      ++rep.progFvChecks;
      for (const State& omega : sMu.states) {
        bool matched = false;
        for (const State& omega2 : sNu.states)
          if (omega.equalOn(omega2, v)) {
            matched = true;
            break;
          }
        if (!matched && !sNu.truncated) {
          rep.failures.push_back(
              {"program-fv coincidence",
               "program " + progStr(th, p) + " mu=" + mu.str() +
                   " nu=" + nu2.str() + " unmatched successor " + omega.str()});
          break;
        }
      }
    }

    // Bounded effect: every transition agrees outside progBv(p).
    {
      VarSetBase bv = th.progBv(p);
      auto succ = th.progSucc(mu, p, b);
      ++rep.boundedEffectChecks;
      for (const State& nu2 : succ.states) {
        if (!mu.equalOnComplement(nu2, bv)) {
          rep.failures.push_back(
              {"bounded effect", "program " + progStr(th, p) + " bv=" +
                                     bv.str() + " mu=" + mu.str() + " nu=" +
                                     nu2.str()});
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace dynth
