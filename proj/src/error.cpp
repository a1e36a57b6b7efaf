#include "mma/error.hpp"

namespace mma {

std::string_view err_name(ErrCode code) {
    switch (code) {
        case ErrCode::AccNotPrimed: return "AccNotPrimed";
        case ErrCode::AccAlreadyPrimed: return "AccAlreadyPrimed";
        case ErrCode::VsrLocked: return "VsrLocked";
        case ErrCode::OperandOverlapsAccumulator: return "OperandOverlapsAccumulator";
        case ErrCode::InvalidVsrPair: return "InvalidVsrPair";
        case ErrCode::EmptyMultiply: return "EmptyMultiply";
        case ErrCode::ShapeError: return "ShapeError";
        case ErrCode::UnknownMnemonic: return "UnknownMnemonic";
        case ErrCode::IllegalSuffix: return "IllegalSuffix";
        case ErrCode::MaskWidthError: return "MaskWidthError";
        case ErrCode::SyntaxError: return "SyntaxError";
        case ErrCode::OperandError: return "OperandError";
        case ErrCode::IoError: return "IoError";
    }
    return "?";
}

} // namespace mma
