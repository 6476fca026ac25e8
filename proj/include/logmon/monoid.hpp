// Fine monoids stored as generator lists inside an ambient finitely generated
// abelian group, together with faces, quotients, localizations, saturation,
// sections of surjections and verticality.
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "logmon/errors.hpp"
#include "logmon/linalg.hpp"
#include "logmon/rational.hpp"

namespace logmon {

// Integer coordinates: free part first, then torsion residues.
using Element = std::vector<std::int64_t>;

std::int64_t to_i64(const Z& z);

struct AbelianGroup {
  std::size_t free_rank = 0;
  std::vector<std::int64_t> torsion_invariants;  // d_1 | d_2 | ..., each >= 2
  bool torsion_free() const { return torsion_invariants.empty(); }
  bool operator==(const AbelianGroup& o) const = default;
};

// Z^free_rank + sum Z/torsion[j]. Moduli need not form a divisibility chain.
struct AmbientGroup {
  std::size_t free_rank = 0;
  std::vector<std::int64_t> torsion;

  static AmbientGroup of(const AbelianGroup& g) { return {g.free_rank, g.torsion_invariants}; }
  std::size_t dim() const { return free_rank + torsion.size(); }
  Element zero() const { return Element(dim(), 0); }
  Element reduce(Element x) const;
  Element add(const Element& x, const Element& y) const;
  Element sub(const Element& x, const Element& y) const;
  Element neg(const Element& x) const;
  Element scale(std::int64_t c, const Element& x) const;
  QVector free_part(const Element& x) const;
  void check(const Element& x) const;
  bool operator==(const AmbientGroup& o) const = default;
};

enum class Tri { False, True, Unknown };
const char* to_string(Tri t);

class FineMonoid {
 public:
  using Relation = std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>>;

  // Image of the monoid <e_1..e_n | u = v> in its Grothendieck group.
  static FineMonoid from_presentation(std::size_t n, const std::vector<Relation>& relations);
  // Submonoid of an ambient group generated by the given elements.
  static FineMonoid from_generators(AmbientGroup ambient, std::vector<Element> generators);
  // Same monoid with an explicit weighting; checks h^{-1}(0) = units.
  FineMonoid with_weighting(std::vector<std::int64_t> weights) const;

  const AmbientGroup& ambient() const;
  const std::vector<Element>& generators() const;
  std::size_t size() const;
  const AbelianGroup& gp() const;
  const std::vector<std::int64_t>& weights() const;
  const std::vector<bool>& unit_generators() const;
  bool is_sharp() const;

  // Some integer c with sum c_i g_i = x, when x lies in the group generated.
  std::optional<std::vector<Z>> coefficients(const Element& x) const;
  bool in_gp(const Element& x) const;
  // The weighting extended to the group; NotInGroupSpan outside it.
  std::int64_t weight(const Element& x) const;
  // Rational coefficients of a vector of the free ambient part, if it lies in gp (x) Q.
  std::optional<QVector> rational_coefficients(const QVector& xi) const;
  Q weight_q(const QVector& xi) const;

  // Canonical coordinates of gp (free, then torsion residues).
  Element gp_coordinates(const Element& x) const;
  Element gp_coordinates_of(const std::vector<Z>& coeffs) const;
  Element from_gp_coordinates(const Element& y) const;
  // Columns span the lattice of integer relations among the generators.
  const ZMatrix& relation_lattice() const;
  // k x n matrix whose columns are the free parts of the generators.
  QMatrix free_generator_matrix() const;

  struct Impl;  // opaque

 private:
  std::shared_ptr<const Impl> impl_;
  explicit FineMonoid(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend class Explorer;
};

// Weight-graded enumeration of a monoid modulo its units. Holds a private
// cache; create one per computation.
class Explorer {
 public:
  explicit Explorer(FineMonoid m, std::size_t element_cap = 4000000);
  bool contains(const Element& x);
  // Class representatives of weight exactly w (keys are classes modulo units).
  const std::map<Element, Element>& level(std::int64_t w);
  Element key(const Element& x) const;
  // Minimal weight y in M with y - m in M; returns (h(y), y).
  std::pair<std::int64_t, Element> h_plus(const Element& m);
  // All representatives with weight <= w, ordered by weight then coordinates.
  std::vector<Element> elements_up_to(std::int64_t w);
  const FineMonoid& monoid() const { return m_; }

 private:
  FineMonoid m_;
  std::size_t cap_;
  std::size_t count_ = 0;
  std::vector<std::map<Element, Element>> levels_;
  std::vector<Element> gen_keys_;
  Element add_keys(const Element& a, const Element& b) const;
  Element sub_keys(const Element& a, const Element& b) const;
};

bool membership(const FineMonoid& m, const Element& g);
// a <= b, i.e. b - a in M.
bool divides(const FineMonoid& m, const Element& a, const Element& b);
std::vector<Element> units(const FineMonoid& m);

class MonoidHom {
 public:
  MonoidHom(FineMonoid source, FineMonoid target, std::vector<Element> images);
  const FineMonoid& source() const { return src_; }
  const FineMonoid& target() const { return tgt_; }
  const std::vector<Element>& images() const { return images_; }
  // Induced group map, for x in the source group.
  Element apply(const Element& x) const;

 private:
  FineMonoid src_, tgt_;
  std::vector<Element> images_;
};

std::pair<FineMonoid, MonoidHom> sharp_quotient(const FineMonoid& m);

struct Face {
  std::vector<std::size_t> generators;  // indices into the parent's generator list
  bool operator==(const Face& o) const = default;
};
std::vector<Element> face_generators(const FineMonoid& m, const Face& f);

constexpr std::size_t kDefaultFaceCap = 16;
std::vector<Face> faces(const FineMonoid& m, std::size_t generator_cap = kDefaultFaceCap);
std::vector<Face> facets(const FineMonoid& m, std::size_t generator_cap = kDefaultFaceCap);

struct GroupQuotient {
  AbelianGroup group;
  std::vector<Element> generator_images;  // canonical coordinates of gp / N^gp
};
GroupQuotient quotient_group(const FineMonoid& m, const std::vector<Element>& sub);
std::pair<FineMonoid, MonoidHom> quotient(const FineMonoid& m, const std::vector<Element>& sub);
FineMonoid localize(const FineMonoid& m, const Face& f);
bool is_semi_saturated(const FineMonoid& m);

struct SaturationWitness {
  Element g;
  std::int64_t n = 0;
};
struct SaturationResult {
  FineMonoid saturation;
  bool complete = false;
  std::vector<SaturationWitness> witnesses;
};
SaturationResult saturation_bounded(const FineMonoid& m, std::int64_t weight_bound);
Tri is_saturated_bounded(const FineMonoid& m, std::int64_t weight_bound);

struct SectionChecks {
  bool composition_identity = false;  // f o s = id on the target group
  bool kernel_maps_to_zero = false;
  bool splitting = false;             // (s, inclusion) is an isomorphism onto the source group
  bool sharp_identity_applicable = false;
  bool sharp_identity = false;        // (Im s + N) cap Ker f^gp = Ker f, at bounded weight
  bool all() const {
    return composition_identity && kernel_maps_to_zero && splitting &&
           (!sharp_identity_applicable || sharp_identity);
  }
};

struct SectionData {
  MonoidHom hom;
  FineMonoid ntilde;  // preimage of the target, in canonical source-group coordinates
  MonoidHom section;
  AbelianGroup kernel;
  std::vector<Element> kernel_generators;
  SectionChecks checks;
};
SectionData section(const MonoidHom& f, std::int64_t search_bound = 8);

Tri is_vertical(const MonoidHom& f, std::int64_t search_bound);

}  // namespace logmon
