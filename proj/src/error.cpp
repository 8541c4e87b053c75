#include "rlab/error.hpp"

namespace rlab {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Capability: return "capability";
        case ErrorKind::Argument: return "argument";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Singularity: return "singularity";
        case ErrorKind::NotFiniteType: return "not finite type";
        case ErrorKind::NormalForm: return "normal form";
        case ErrorKind::Construction: return "construction";
        case ErrorKind::StationarySolve: return "stationary solve";
        case ErrorKind::Degeneracy: return "degeneracy";
        case ErrorKind::Calibration: return "calibration";
        case ErrorKind::Frame: return "frame";
        case ErrorKind::Resolution: return "resolution";
        case ErrorKind::Config: return "config";
        case ErrorKind::Numerical: return "numerical";
    }
    return "unknown";
}

}  // namespace rlab
