#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bsev/logic/term.hpp"

namespace bsev::logic {

/// A parallel update {l1 := t1 || ... || ln := tn}. Locations are program
/// variables or heap variables; a later elementary on the same location
/// replaces the earlier one.
class Update {
 public:
  Update() = default;

  /// Adds the elementary `loc := value` in parallel (last wins).
  Update& set(const TermPtr& loc, TermPtr value);

  /// Sequential composition: the update that acts like `*this` followed by
  /// `next`, i.e. {this}{next}t == {this.then(next)}t.
  Update then(const Update& next) const;

  /// `*this` followed by the single elementary `loc := value`, where value
  /// is read in the state after `*this`.
  Update assign(const TermPtr& loc, const TermPtr& value) const;

  bool empty() const { return elems_.empty(); }
  const std::vector<std::pair<TermPtr, TermPtr>>& elements() const { return elems_; }
  /// Value bound to a location, or nullptr.
  TermPtr lookup(const TermPtr& loc) const;

 private:
  std::vector<std::pair<TermPtr, TermPtr>> elems_;
};

/// Applies `u` to `t` (simultaneous substitution), then simplifies
/// select-over-store. The result contains no update. Throws SortError if an
/// elementary would change the sort of a location.
TermPtr apply_update(const Update& u, const TermPtr& t);

std::string to_string(const Update& u);

}  // namespace bsev::logic
