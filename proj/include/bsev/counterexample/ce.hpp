#pragma once

#include <string>
#include <vector>

#include "bsev/engine/build.hpp"
#include "bsev/logic/eval.hpp"

namespace bsev {

/// A standalone program reconstructing one open branch: class `CeFrame`
/// whose fields hold the prestate and whose method `ce()` replays the
/// branch with external effects replaced by model values.
struct Counterexample {
  std::string text;
  std::string file_stem;  // <Class>_<method>
};

struct CeOptions {
  /// Conjuncts of the failed goal that are not provable, already printed.
  std::vector<std::string> residual;
};

/// `leaf` is an open logic node (with `model` from the solver) or a stuck
/// node (model may be null; every value is then a placeholder).
Counterexample generate_ce(const Program& p, const ProofObligation& po, const SENode& leaf,
                           const logic::EvalEnv* model, const CeOptions& opt = {});

/// MiniABS literal for a model value. References and futures become
/// strings, since the frame retypes them to String.
std::string render_value(const Program& p, const logic::Value& v, const Type& t);

/// Reads `old.f` as `heap.f` when the path condition equates the two heaps,
/// which is the case until the first heap change of a method.
std::string display_obligation(const logic::TermPtr& t, const std::vector<logic::TermPtr>& gamma);

}  // namespace bsev
