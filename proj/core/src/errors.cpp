#include "opplab/errors.hpp"

namespace opplab {

void throw_invalid(const std::string& what) { throw InvalidArgument(what); }

}  // namespace opplab
