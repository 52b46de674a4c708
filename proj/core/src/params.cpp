#include "fput/params.hpp"

#include <stdexcept>

namespace fput {

const char* to_string(Sector s) {
    switch (s) {
        case Sector::Singlet: return "singlet";
        case Sector::DoubletB: return "doubletB";
        case Sector::DoubletC: return "doubletC";
    }
    return "?";
}

Sector sector_from_string(const std::string& name) {
    if (name == "singlet" || name == "Singlet" || name == "A") return Sector::Singlet;
    if (name == "doubletB" || name == "DoubletB" || name == "B") return Sector::DoubletB;
    if (name == "doubletC" || name == "DoubletC" || name == "C") return Sector::DoubletC;
    throw std::invalid_argument("unknown sector: " + name);
}

void ModelParams::validate() const {
    if (!(hbar > 0)) throw std::invalid_argument("hbar must be positive");
    if (cutoff_n < 0) throw std::invalid_argument("cutoff_n must be >= 0");
    if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
}

}  // namespace fput
