#pragma once

#include <stdexcept>
#include <string>

namespace mofkit {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define MOFKIT_ERROR_TYPE(Name)                                   \
    class Name : public Error {                                   \
    public:                                                       \
        explicit Name(const std::string& msg) : Error(msg) {}     \
    }

MOFKIT_ERROR_TYPE(DimensionMismatch);
MOFKIT_ERROR_TYPE(StructureViolation);
MOFKIT_ERROR_TYPE(NotPositive);
MOFKIT_ERROR_TYPE(NotInvertible);
MOFKIT_ERROR_TYPE(NotTwoFactor);
MOFKIT_ERROR_TYPE(NotCentral);
MOFKIT_ERROR_TYPE(NotCommuting);
MOFKIT_ERROR_TYPE(NotNormal);
MOFKIT_ERROR_TYPE(NotScalarMof);
MOFKIT_ERROR_TYPE(SamePoint);
MOFKIT_ERROR_TYPE(NoBasePoint);
MOFKIT_ERROR_TYPE(AllScalar);
MOFKIT_ERROR_TYPE(MetricAxiomViolation);
MOFKIT_ERROR_TYPE(BundleMismatch);
MOFKIT_ERROR_TYPE(NormBoundExceeded);
MOFKIT_ERROR_TYPE(InvalidPartition);   // quotient builder: bad partition of the base set
MOFKIT_ERROR_TYPE(PartitionInvalid);   // covers: bumps fail the partition-of-unity conditions
MOFKIT_ERROR_TYPE(ParseError);
MOFKIT_ERROR_TYPE(SchemaVersionMismatch);
MOFKIT_ERROR_TYPE(TooFewPoints);

#undef MOFKIT_ERROR_TYPE

} // namespace mofkit
