#ifndef NCT_RSCODE_HPP
#define NCT_RSCODE_HPP

#include <optional>
#include <vector>

#include "nct/matrix.hpp"

namespace nct {

/// Parity-check structure H = [h_1 ... h_{l2}] with column j the power
/// column [h_j, h_j^2, ..., h_j^{l1}]^T. Locators are nonzero and pairwise
/// distinct; l2 > l1.
class RsParitySpec {
  public:
    RsParitySpec(std::vector<FieldElement> locators, std::size_t depth);

    std::size_t length() const { return locators_.size(); } // l2
    std::size_t depth() const { return depth_; }            // l1
    const std::vector<FieldElement>& locators() const { return locators_; }
    Field field() const { return locators_[0].field(); }

    /// The full parity matrix (tests and small instances only).
    FieldMatrix matrix() const;

  private:
    std::vector<FieldElement> locators_;
    std::size_t depth_;
};

/// Sparse vector as sorted (index, value) entries with nonzero values.
struct SparseVector {
    std::vector<std::pair<std::size_t, FieldElement>> entries;

    std::size_t weight() const { return entries.size(); }
    bool operator==(const SparseVector& o) const { return entries == o.entries; }
};

/// H * b for a sparse b; columns indexed against the locator list.
FieldVector rs_syndrome(const RsParitySpec& spec, const SparseVector& b);

/// The unique b with weight <= z_max and H b = e, when one exists; nullopt
/// when the syndrome is not explained by that few columns. Requires
/// z_max <= floor(l1 / 2).
///
/// Berlekamp-Massey over the syndrome sequence e_1..e_{l1} (powers start at
/// exponent 1), roots matched by scanning the locator list, magnitudes from
/// the square system on the found support, then a full consistency check.
std::optional<SparseVector> rs_decode(const RsParitySpec& spec, const FieldVector& e,
                                      std::size_t z_max);

} // namespace nct

#endif
