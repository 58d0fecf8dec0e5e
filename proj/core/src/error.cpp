#include "sparsescan/error.hpp"

namespace sparsescan {

void throw_validation(const std::string& message) { throw ValidationError(message); }

}  // namespace sparsescan
