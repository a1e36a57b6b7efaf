#ifndef MMA_ERROR_HPP
#define MMA_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace mma {

enum class ErrCode {
    AccNotPrimed,
    AccAlreadyPrimed,
    VsrLocked,
    OperandOverlapsAccumulator,
    InvalidVsrPair,
    EmptyMultiply,
    ShapeError,
    UnknownMnemonic,
    IllegalSuffix,
    MaskWidthError,
    SyntaxError,
    OperandError,
    IoError,
};

std::string_view err_name(ErrCode code);

class MmaError : public std::runtime_error {
  public:
    MmaError(ErrCode code, const std::string& msg)
        : std::runtime_error(std::string(err_name(code)) + ": " + msg), code_(code),
          detail_(msg) {}

    ErrCode code() const { return code_; }
    // Message without the error-name prefix.
    const std::string& detail() const { return detail_; }

  private:
    ErrCode code_;
    std::string detail_;
};

} // namespace mma

#endif
