#pragma once

#include <string>

namespace fput {

/// C3v symmetry sectors of the circular two-mode basis, keyed by l mod 3.
enum class Sector { Singlet = 0, DoubletB = 1, DoubletC = 2 };

const char* to_string(Sector s);
Sector sector_from_string(const std::string& name);

/// residue r such that every basis state of the sector has l ≡ r (mod 3)
inline int sector_residue(Sector s) { return static_cast<int>(s); }

/// Physical and truncation parameters of the three-particle FPUT model.
///
/// The scaled classical Hamiltonian is
///   H = (p1^2 + p2^2 + q1^2 + q2^2)/2 + alpha*(q1^2 q2 - q2^3/3) + lambda*(q1^2 + q2^2)^2,
/// lambda = 3 beta / (4 alpha^2); lambda = 0 is the alpha-FPUT (Henon-Heiles) case.
struct ModelParams {
    double alpha = 1.0;
    double lambda = 0.0;
    double hbar = 1e-3;
    int cutoff_n = 0;             // basis keeps all n <= cutoff_n
    Sector sector = Sector::Singlet;

    void validate() const;        // throws std::invalid_argument on violated invariants
};

}  // namespace fput
