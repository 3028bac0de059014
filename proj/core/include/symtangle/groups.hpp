#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "symtangle/operator.hpp"

namespace symtangle {

// Local symmetry group families.  Each family G is a group of product
// unitaries U1 (x) U2; states commuting with all of G form a low-dimensional
// section parameterized by a few invariant coordinates.
//
//   uu          { U (x) U }                      (flip-invariant states)
//   uubar       { U (x) conj(U) }                (isotropic states)
//   oo          { O (x) O, O real orthogonal }
//   bell        Klein four-group {1, -s_k (x) s_k} of Pauli pairs
//   weyl        { W (x) W } over discrete Weyl (clock/shift) unitaries
//   weyl_conj   { W (x) conj(W) }
//   su2         { D^j1(u) (x) D^j2(u), u in SU(2) } (doubled spins)
//   tensor      G (x) H acting on pair states, factors sorted first/second
//   tensor_flip tensor(uu(d), uu(d)) enlarged by the pair-swap unitary
class GroupSpec {
 public:
  enum class Family { uu, uubar, oo, bell, weyl, weyl_conj, su2, tensor, tensor_flip };

  static GroupSpec uu(int d);
  static GroupSpec uubar(int d);
  static GroupSpec oo(int d);
  static GroupSpec bell();
  static GroupSpec weyl(int d);
  static GroupSpec weyl_conj(int d);
  static GroupSpec su2(int two_j1, int two_j2);
  static GroupSpec tensor(GroupSpec a, GroupSpec b);
  static GroupSpec tensor_flip(int d);

  Family family() const { return family_; }
  int local_dim() const { return d_; }
  int two_j1() const { return two_j1_; }
  int two_j2() const { return two_j2_; }
  const GroupSpec& part(int i) const { return parts_.at(i); }

  Dims dims() const;
  std::string name() const;

  friend bool operator==(const GroupSpec& a, const GroupSpec& b);

 private:
  GroupSpec() = default;

  Family family_ = Family::uu;
  int d_ = 0;
  int two_j1_ = 0;
  int two_j2_ = 0;
  std::vector<GroupSpec> parts_;
};

// Linear basis of the commutant algebra G' = {A : [A, g] = 0 for all g in G}.
struct CommutantBasis {
  std::vector<Operator> ops;  // spanning set, identity last
  Eigen::MatrixXcd gram;      // gram(i,j) = tr(ops[i]^dagger ops[j])
  bool abelian = false;

  // Orthogonal idempotents summing to one; populated only when the commutant
  // is abelian.  Order is part of the family contract.
  std::vector<Operator> minimal_projections;

  // Hermitian observables whose expectations are the invariant coordinates
  // (the identity is excluded; its expectation is always one).
  std::vector<Operator> coord_ops;
  std::vector<std::string> labels;  // one label per coordinate
};

CommutantBasis commutant_basis(const GroupSpec& g);

// A group element drawn from the invariant (Haar or counting) measure.
Operator haar_sample(const GroupSpec& g, std::mt19937_64& rng);

// Group average P(A) = avg_g g A g^dagger, computed exactly as the
// Hilbert-Schmidt orthogonal projection onto the commutant span.
Operator twirl(const CommutantBasis& basis, const Operator& a);
Operator twirl(const GroupSpec& g, const Operator& a);

// Invariant coordinates of a state: expectations of the coordinate
// observables.  Equal to the coordinates of the twirled state.
Eigen::VectorXd invariant_coords(const GroupSpec& g, const DensityMatrix& rho);
Eigen::VectorXd invariant_coords(const CommutantBasis& basis, const Operator& a);

// The unique invariant state with the given coordinates.  Throws NotAState
// when the reconstruction has an eigenvalue below -1e-9.
DensityMatrix state_from_coords(const GroupSpec& g, const Eigen::VectorXd& coords);

// The partner group {U1 (x) conj(U2)}.  Partial transposition maps
// G-invariant operators onto partner-invariant operators and intertwines the
// two twirls.  Unsupported for su2 and tensor_flip.
GroupSpec partial_conjugate(const GroupSpec& g);

// Discrete Weyl unitary W(x,y)|z> = w^{xz} |z-y>, w = exp(2 pi i / d).
Eigen::MatrixXcd weyl_operator(int d, int x, int y);

// Total-spin projections of a product of two SU(2) irreps (doubled spins).
// Ordered by ascending total spin.  Integer-spin irreps are constructed in a
// real (tesseral) basis, so their rotation matrices are real orthogonal.
std::vector<Operator> su2_projections(int two_j1, int two_j2);

// Spin operators (Jx, Jy, Jz) of one irrep in the convention above.
std::array<Eigen::MatrixXcd, 3> su2_generators(int two_j);

// Rotation matrix of one irrep for a unit quaternion (w, x, y, z).
Eigen::MatrixXcd su2_rotation(int two_j, const Eigen::Vector4d& quaternion);

// Haar-distributed samples via QR of Gaussian ensembles.
Eigen::MatrixXcd haar_unitary(int d, std::mt19937_64& rng);
Eigen::MatrixXd haar_orthogonal(int d, std::mt19937_64& rng);
Eigen::Vector4d random_quaternion(std::mt19937_64& rng);
Eigen::VectorXcd random_unit_vector(int n, std::mt19937_64& rng);
DensityMatrix random_density(Dims dims, std::mt19937_64& rng);

}  // namespace symtangle
