#ifndef CURATOR_ERRORS_HPP
#define CURATOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace curator {

// Base of all library errors. Two categories drive the CLI exit codes:
// InputError (bad files/flags/CSV, exit 2) and DomainError (a well-formed
// input the algorithms cannot process, exit 3). Anything else that escapes
// is an internal invariant violation (exit 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

#define CURATOR_DEFINE_ERROR(NAME, BASE)                                      \
    class NAME : public BASE {                                                \
    public:                                                                   \
        using BASE::BASE;                                                     \
    };

// image-core
CURATOR_DEFINE_ERROR(IoError, InputError)
CURATOR_DEFINE_ERROR(DecodeError, InputError)
CURATOR_DEFINE_ERROR(UnsupportedDepth, InputError)
CURATOR_DEFINE_ERROR(NotColorImage, DomainError)
CURATOR_DEFINE_ERROR(EmptyHistogram, DomainError)

// morphology-segmentation
CURATOR_DEFINE_ERROR(ElementTooLarge, DomainError)
CURATOR_DEFINE_ERROR(DegeneratePlane, DomainError)
CURATOR_DEFINE_ERROR(EmptyMask, DomainError)

// diversity-selection
CURATOR_DEFINE_ERROR(DimensionMismatch, InputError)
CURATOR_DEFINE_ERROR(IndexOutOfRange, DomainError)
CURATOR_DEFINE_ERROR(DuplicateIndex, DomainError)
CURATOR_DEFINE_ERROR(KTooLarge, DomainError)
CURATOR_DEFINE_ERROR(InstanceTooLarge, DomainError)

// metrics
CURATOR_DEFINE_ERROR(EmptyRoi, DomainError)
CURATOR_DEFINE_ERROR(WeightOutOfRange, DomainError)
CURATOR_DEFINE_ERROR(TooFewSamples, DomainError)
CURATOR_DEFINE_ERROR(NotPsd, DomainError)
CURATOR_DEFINE_ERROR(NonFiniteInput, InputError)

// pipeline
CURATOR_DEFINE_ERROR(CsvParseError, InputError)
CURATOR_DEFINE_ERROR(NoRecords, InputError)
CURATOR_DEFINE_ERROR(ClassTooSmall, DomainError)
CURATOR_DEFINE_ERROR(SeedSegmentationFailed, DomainError)
CURATOR_DEFINE_ERROR(CohortTooSmall, DomainError)
CURATOR_DEFINE_ERROR(SchemaVersionMismatch, InputError)

#undef CURATOR_DEFINE_ERROR

} // namespace curator

#endif // CURATOR_ERRORS_HPP
