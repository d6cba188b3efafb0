#pragma once

#include <stdexcept>
#include <string>

namespace msdi {

#define MSDI_ERROR(Name)                                                      \
    struct Name : std::runtime_error {                                        \
        explicit Name(const std::string &what) : std::runtime_error(what) { \
        }                                                                     \
    }

MSDI_ERROR(ZeroProbabilityEvent);
MSDI_ERROR(SupportMismatch);
MSDI_ERROR(SupportTooLarge);
MSDI_ERROR(AlreadyFired);
MSDI_ERROR(DoubleTick);
MSDI_ERROR(LengthMismatch);
MSDI_ERROR(SeedLengthMismatch);
MSDI_ERROR(RankDeficient);
MSDI_ERROR(DistanceSearchTooLarge);
MSDI_ERROR(ConfigError);
MSDI_ERROR(ExactModeTooLarge);
MSDI_ERROR(DuplicateBoxIndex);
MSDI_ERROR(InterfaceMismatch);
MSDI_ERROR(RegisterMismatch);
MSDI_ERROR(OracleProtocolViolation);
MSDI_ERROR(DegenerateParameters);

#undef MSDI_ERROR

}  // namespace msdi
