// Derived rules: each one replays its derivation through the primitive
// kernel operations, so no new trusted code is introduced here.

#include "dynth/hetero.hpp"
#include "dynth/kernel.hpp"
#include "dynth/lifting.hpp"
#include "dynth/parser.hpp"

namespace dynth {
namespace kernel {

namespace {

[[noreturn]] void bail(const std::string& msg) { throw KernelError(msg); }

Formula forallVec(const std::vector<VarId>& vec, Formula f) {
  for (auto it = vec.rbegin(); it != vec.rend(); ++it)
    f = Formula::forall(*it, std::move(f));
  return f;
}

Formula existsVec(const std::vector<VarId>& vec, Formula f) {
  for (auto it = vec.rbegin(); it != vec.rend(); ++it)
    f = Formula::exists(*it, std::move(f));
  return f;
}

// |- X -> Y  gives  |- forall vec X -> forall vec Y
Theorem allMonoFold(const Theory& th, const std::vector<VarId>& vec,
                    const Theorem& imp) {
  auto xy = imp.conclusion().asImplies();
  if (!xy) bail("allMonoFold: premise is not an implication");
  if (vec.empty()) return imp;
  std::vector<VarId> rest(vec.begin() + 1, vec.end());
  Theorem inner = allMonoFold(th, rest, imp);
  auto xy2 = inner.conclusion().asImplies();
  Theorem g = gen(th, inner, vec.front());
  Theorem qd = axQDist(th, vec.front(), xy2->first, xy2->second);
  return mp(th, qd, g);
}

// |- forall v (X -> Y) -> (exists v X -> exists v Y)
Theorem qDistDia1(const Theory& th, VarId v, const Formula& x,
                  const Formula& y) {
  Formula nx = Formula::mkNot(x), ny = Formula::mkNot(y);
  Theorem contr = taut(th, Formula::implies(Formula::implies(x, y),
                                            Formula::implies(ny, nx)));
  Theorem gContr = gen(th, contr, v);
  Theorem qd1 = axQDist(th, v, Formula::implies(x, y), Formula::implies(ny, nx));
  Theorem step1 = mp(th, qd1, gContr);  // all v (x->y) -> all v (!y -> !x)
  Theorem qd2 = axQDist(th, v, ny, nx);
  Theorem step2 = chainImp(th, step1, qd2);
  // |- all v(x->y) -> (all v !y -> all v !x) ; flip the inner implication
  auto outer = step2.conclusion().asImplies();
  Formula exX = Formula::exists(v, x), exY = Formula::exists(v, y);
  Formula goal = Formula::implies(outer->first, Formula::implies(exX, exY));
  return mp(th, taut(th, Formula::implies(step2.conclusion(), goal)), step2);
}

// |- X -> Y  gives  |- exists vec X -> exists vec Y
Theorem exMonoFold(const Theory& th, const std::vector<VarId>& vec,
                   const Theorem& imp) {
  if (vec.empty()) return imp;
  std::vector<VarId> rest(vec.begin() + 1, vec.end());
  Theorem inner = exMonoFold(th, rest, imp);
  auto xy = inner.conclusion().asImplies();
  Theorem g = gen(th, inner, vec.front());
  Theorem qdd = qDistDia1(th, vec.front(), xy->first, xy->second);
  return mp(th, qdd, g);
}

// |- forall vec X -> X (identity instantiation per variable)
Theorem forallElimFold(const Theory& th, const std::vector<VarId>& vec,
                       const Formula& x) {
  if (vec.empty()) bail("forallElimFold: empty vector");
  std::vector<Formula> layers;  // layers[k] = forall vec[k:] x
  layers.push_back(x);
  for (auto it = vec.rbegin(); it != vec.rend(); ++it)
    layers.insert(layers.begin(), Formula::forall(*it, layers.front()));
  Theorem acc = axForallElim(th, vec[0], vec[0], layers[1]);
  for (std::size_t k = 1; k < vec.size(); ++k)
    acc = chainImp(th, acc, axForallElim(th, vec[k], vec[k], layers[k + 1]));
  return acc;
}

// |- exists vec X -> X for vec disjoint from fv(X)
Theorem exVacFold(const Theory& th, const std::vector<VarId>& vec,
                  const Formula& x) {
  if (vec.empty()) bail("exVacFold: empty vector");
  // innermost first: exists v_n X -> X, then wrap leftwards
  Formula cur = x;
  std::optional<Theorem> acc;
  for (auto it = vec.rbegin(); it != vec.rend(); ++it) {
    Formula exCur = Formula::exists(*it, cur);
    Theorem vac = axVacuous(th, *it, Formula::mkNot(cur));
    // !cur -> all v !cur  flips to  exists v cur -> cur
    Formula goal = Formula::implies(exCur, cur);
    Theorem step = mp(th, taut(th, Formula::implies(vac.conclusion(), goal)), vac);
    acc = acc ? chainImp(th, step, *acc) : step;
    cur = exCur;
  }
  return *acc;
}

}  // namespace

Theorem ruleM(const Theory& th, const Theorem& premise, const Program& p) {
  auto imp = premise.conclusion().asImplies();
  if (!imp) bail("M: premise is not an implication");
  Theorem boxed = ruleG(th, premise, p);
  Theorem k = axK(th, p, imp->first, imp->second);
  return mp(th, k, boxed);
}

Theorem ruleMR(const Theory& th, const Theorem& xiImpBoxPhi,
               const Theorem& phiImpPsi) {
  auto outer = xiImpBoxPhi.conclusion().asImplies();
  if (!outer || outer->second.kind() != Formula::Kind::Box)
    bail("MR: first premise must have shape xi -> [p]phi");
  auto inner = phiImpPsi.conclusion().asImplies();
  if (!inner) bail("MR: second premise must be an implication");
  if (!outer->second.child().structurallyEqual(inner->first))
    bail("MR: premises do not agree on phi");
  Theorem m = ruleM(th, phiImpPsi, outer->second.program());
  return chainImp(th, xiImpBoxPhi, m);
}

Theorem axBoxAnd(const Theory& th, const Program& p, const Formula& f,
                 const Formula& g) {
  Formula boxF = Formula::box(p, f), boxG = Formula::box(p, g);
  Formula boxFG = Formula::box(p, Formula::mkAnd(f, g));
  Formula lhs = Formula::mkAnd(boxF, boxG);

  // -> direction: G + K twice over f -> (g -> f & g)
  Theorem t1 = taut(th, Formula::implies(
                            f, Formula::implies(g, Formula::mkAnd(f, g))));
  Theorem b1 = ruleM(th, t1, p);  // [p]f -> [p](g -> f&g)
  Theorem k2 = axK(th, p, g, Formula::mkAnd(f, g));
  Theorem c1 = chainImp(th, b1, k2);  // [p]f -> ([p]g -> [p](f&g))
  Formula fwd = Formula::implies(lhs, boxFG);
  Theorem dir1 =
      mp(th, taut(th, Formula::implies(c1.conclusion(), fwd)), c1);

  // <- direction from the two projections
  Theorem pf = ruleM(th, taut(th, Formula::implies(Formula::mkAnd(f, g), f)), p);
  Theorem pg = ruleM(th, taut(th, Formula::implies(Formula::mkAnd(f, g), g)), p);
  Formula bwd = Formula::implies(boxFG, lhs);
  Theorem dir2 = mp(
      th,
      mp(th,
         taut(th, Formula::implies(
                      pf.conclusion(),
                      Formula::implies(pg.conclusion(), bwd))),
         pf),
      pg);

  Formula goal = Formula::iff(lhs, boxFG);
  return mp(th,
            mp(th,
               taut(th, Formula::implies(
                            fwd, Formula::implies(bwd, goal))),
               dir1),
            dir2);
}

Theorem axKDia(const Theory& th, const Program& p, const Formula& f,
               const Formula& g) {
  Formula nf = Formula::mkNot(f), ng = Formula::mkNot(g);
  // c2: [p](f->g) -> [p](!g -> !f)
  Theorem contr = taut(th, Formula::implies(Formula::implies(f, g),
                                            Formula::implies(ng, nf)));
  Theorem mc = ruleM(th, contr, p);
  // c1: [p](!g->!f) -> (<p>f -> <p>g)
  Theorem k = axK(th, p, ng, nf);
  auto kImp = k.conclusion().asImplies();
  Formula diaF = Formula::diamond(p, f), diaG = Formula::diamond(p, g);
  Formula flip = Formula::implies(kImp->first, Formula::implies(diaF, diaG));
  Theorem c1 = mp(th, taut(th, Formula::implies(k.conclusion(), flip)), k);
  return chainImp(th, mc, c1);
}

Theorem axMPDia(const Theory& th, const Program& p, const Formula& psi,
                const Formula& phi, const std::vector<VarId>& vec) {
  checkWellFormed(th, psi);
  checkWellFormed(th, phi);
  if (vec.empty()) bail("MPdia: needs a nonempty variable vector");
  VarSetBase vecSet{std::vector<VarId>(vec.begin(), vec.end())};
  if (!vecSet.supersetOf(th.progBv(p)))
    bail("MPdia: the variable vector must cover the program's bound variables " +
         th.progBv(p).str());
  Formula impl = Formula::implies(psi, phi);
  Formula allImp = forallVec(vec, impl);
  Theorem v = axV(th, p, allImp);  // allImp -> [p] allImp
  Theorem unwrap = forallElimFold(th, vec, impl);  // allImp -> (psi->phi)
  Theorem m = ruleM(th, unwrap, p);  // [p]allImp -> [p](psi->phi)
  Theorem kd = axKDia(th, p, psi, phi);  // [p](psi->phi) -> (<p>psi -> <p>phi)
  Theorem chain = chainImp(th, chainImp(th, v, m), kd);
  // (allImp -> (Dpsi -> Dphi))  becomes  (Dpsi & allImp) -> Dphi
  Formula diaPsi = Formula::diamond(p, psi), diaPhi = Formula::diamond(p, phi);
  Formula goal = Formula::implies(Formula::mkAnd(diaPsi, allImp), diaPhi);
  return mp(th, taut(th, Formula::implies(chain.conclusion(), goal)), chain);
}

Theorem axPB(const Theory& th, const Program& p, const Formula& phi,
             const Formula& psi, const Formula& xi,
             const std::vector<VarId>& vec, const std::vector<VarId>& vecPlus) {
  checkWellFormed(th, phi);
  checkWellFormed(th, psi);
  checkWellFormed(th, xi);
  Formula diaPhi = Formula::diamond(p, phi), diaXi = Formula::diamond(p, xi);
  VarSetBase vecSet{std::vector<VarId>(vec.begin(), vec.end())};
  VarSetBase vecPlusSet{std::vector<VarId>(vecPlus.begin(), vecPlus.end())};
  VarSetBase need = th.progBv(p);
  need.unite(fvSyn(th, diaPhi));
  if (!vecSet.supersetOf(need))
    bail("PB: the vector must cover bv(p) and fv(<p>phi), i.e. " + need.str());
  VarSetBase expected = fvSyn(th, Formula::mkAnd(psi, xi)).minus(vecSet);
  if (!(vecPlusSet == expected))
    bail("PB: the twin vector must be fv(psi & xi) minus the vector, i.e. " +
         expected.str());
  if (!vecSet.disjoint(vecPlusSet)) bail("PB: the two vectors must be disjoint");

  Formula allXiPhi = forallVec(vec, Formula::implies(xi, phi));
  // c1: (psi -> <p>xi) -> ((psi & allXiPhi) -> <p>phi)
  Theorem mpd = axMPDia(th, p, xi, phi, vec);
  Formula inner = Formula::implies(Formula::implies(psi, diaXi),
                                   Formula::implies(Formula::mkAnd(psi, allXiPhi),
                                                    diaPhi));
  Theorem c1 = mp(th, taut(th, Formula::implies(mpd.conclusion(), inner)), mpd);

  if (vecPlus.empty()) {
    // no twin quantifiers: the goal collapses propositionally
    Formula goal = Formula::implies(
        Formula::mkAnd(Formula::implies(psi, diaXi),
                       Formula::mkAnd(psi, allXiPhi)),
        diaPhi);
    return mp(th, taut(th, Formula::implies(c1.conclusion(), goal)), c1);
  }

  // x1: forall v+ (psi -> <p>xi) -> forall v+ ((psi & allXiPhi) -> <p>phi)
  Theorem x1 = allMonoFold(th, vecPlus, c1);
  // x2: forall v+ ((psi & allXiPhi) -> <p>phi)
  //       -> (exists v+ (psi & allXiPhi) -> exists v+ <p>phi)
  Formula u = Formula::mkAnd(psi, allXiPhi);
  std::vector<VarId> rest(vecPlus.begin() + 1, vecPlus.end());
  // build nested lemma by recursion over the vector
  std::function<Theorem(const std::vector<VarId>&, const Formula&,
                        const Formula&)>
      qdd = [&](const std::vector<VarId>& vs, const Formula& x,
                const Formula& y) -> Theorem {
    if (vs.size() == 1) return qDistDia1(th, vs[0], x, y);
    std::vector<VarId> tail(vs.begin() + 1, vs.end());
    Theorem ih = qdd(tail, x, y);
    auto ihImp = ih.conclusion().asImplies();
    Theorem g = gen(th, ih, vs.front());
    Theorem qd = axQDist(th, vs.front(), ihImp->first, ihImp->second);
    Theorem a = mp(th, qd, g);
    Theorem b = qDistDia1(th, vs.front(), existsVec(tail, x), existsVec(tail, y));
    return chainImp(th, a, b);
  };
  Theorem x2 = qdd(vecPlus, u, diaPhi);
  // x3: exists v+ <p>phi -> <p>phi
  Theorem x3 = exVacFold(th, vecPlus, diaPhi);

  Theorem c2 = chainImp(th, x1, x2);
  // c2: forall v+(psi -> <p>xi) -> (exists v+ u -> exists v+ <p>phi)
  Formula a = forallVec(vecPlus, Formula::implies(psi, diaXi));
  Formula b = existsVec(vecPlus, u);
  Formula exDia = existsVec(vecPlus, diaPhi);
  Formula goal = Formula::implies(Formula::mkAnd(a, b), diaPhi);
  Formula schema = Formula::implies(
      c2.conclusion(),
      Formula::implies(Formula::implies(exDia, diaPhi), goal));
  return mp(th, mp(th, taut(th, schema), c2), x3);
}

Theorem ruleInd(const Theory& th, const Theorem& premise) {
  auto imp = premise.conclusion().asImplies();
  if (!imp || imp->second.kind() != Formula::Kind::Box)
    bail("ind: premise must have shape phi -> [p]phi");
  if (!imp->second.child().structurallyEqual(imp->first))
    bail("ind: premise must have shape phi -> [p]phi");
  const Program& body = imp->second.program();
  Program st = regStar(th, body);
  Theorem boxed = ruleG(th, premise, st);
  Theorem i = axI(th, body, imp->first);
  return mp(th, i, boxed);
}

Theorem axFi(const Theory& th, int i, const Program& alpha, const Formula& psi,
             const Formula& xi, const Formula& frame) {
  if (i != 0 && i != 1) bail("Fi: world index must be 0 or 1");
  checkWellFormed(th, psi);
  checkWellFormed(th, xi);
  checkWellFormed(th, frame);
  std::string offender;
  if (!programPureWorld(th, alpha, 1 - i, &offender))
    bail("Fi: program is not pure world-" + std::to_string(1 - i) + ": " +
         offender);
  if (!formulaPureWorld(th, frame, i, &offender))
    bail("Fi: frame formula is not pure world-" + std::to_string(i) + ": " +
         offender);
  Theorem v = axV(th, alpha, frame);  // frame -> [alpha]frame
  Theorem ba = axBoxAnd(th, alpha, xi, frame);
  Theorem baDir = iffDir(th, ba, 0);  // ([a]xi & [a]frame) -> [a](xi & frame)
  Formula boxXi = Formula::box(alpha, xi);
  Formula goal = Formula::implies(
      Formula::implies(psi, boxXi),
      Formula::implies(Formula::mkAnd(frame, psi),
                       Formula::box(alpha, Formula::mkAnd(xi, frame))));
  Formula schema = Formula::implies(
      v.conclusion(), Formula::implies(baDir.conclusion(), goal));
  return mp(th, mp(th, taut(th, schema), v), baDir);
}

Theorem axGhost(const Theory& th, VarId v, VarId w, const Formula& f) {
  checkWellFormed(th, f);
  auto eq = th.eqPredicate(v, w);
  if (!eq) bail("ghost: theory " + th.describe() + " has no eq predicate");
  if (fvSyn(th, f).contains(v))
    bail("ghost: variable " + v.name() + " is free in the formula");
  auto hv = th.havocProgram(v);
  if (!hv) bail("ghost: theory is not havoc-lifted");
  Formula guard = *eq;
  Program test = regTest(th, guard);
  Program prog = regSeq(th, *hv, test);

  Theorem s = axSeq(th, *hv, test, f);           // [hv;?(e)]f <-> [hv][?(e)]f
  Theorem t = axTest(th, guard, f);              // [?(e)]f <-> (e -> f)
  Theorem c = boxCongruence(th, *hv, t);         // [hv][?(e)]f <-> [hv](e->f)
  Theorem h = axHavoc(th, v, Formula::implies(guard, f));
  // chain the equivalences: [prog]f <-> forall v (e -> f)
  auto iffTrans = [&](const Theorem& pq, const Theorem& qr) {
    auto a = pq.conclusion().asIff();
    auto b = qr.conclusion().asIff();
    if (!a || !b || !a->second.structurallyEqual(b->first))
      bail("ghost: equivalence chain mismatch");
    Formula goal = Formula::iff(a->first, b->second);
    Formula schema = Formula::implies(
        pq.conclusion(), Formula::implies(qr.conclusion(), goal));
    return mp(th, mp(th, taut(th, schema), pq), qr);
  };
  Theorem e1 = iffTrans(iffTrans(s, c), h);

  Theorem fe = axForallElim(th, v, w, Formula::implies(guard, f));
  // [prog]f -> forall v (e->f) -> (e[w/v] -> f), then discharge e[w/v]
  Theorem d1 = iffDir(th, e1, 0);
  Theorem d2 = chainImp(th, d1, fe);
  auto inner = d2.conclusion().asImplies()->second.asImplies();
  if (!inner) bail("ghost: unexpected instantiation shape");
  Theorem id = axIdentityEq(th, w);
  if (!id.conclusion().structurallyEqual(inner->first))
    bail("ghost: instantiated guard is not the identity equation");
  Formula boxProg = Formula::box(prog, f);
  Formula goal = Formula::implies(boxProg, f);
  Formula schema = Formula::implies(
      d2.conclusion(), Formula::implies(id.conclusion(), goal));
  return mp(th, mp(th, taut(th, schema), d2), id);
}

}  // namespace kernel
}  // namespace dynth
