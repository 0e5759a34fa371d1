#include "rvsim/common.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace rvsim {

const char* err_code_name(ErrCode c) {
    switch (c) {
        case ErrCode::UnsupportedEncoding: return "UnsupportedEncoding";
        case ErrCode::IllegalInstruction: return "IllegalInstruction";
        case ErrCode::OperandOutOfRange: return "OperandOutOfRange";
        case ErrCode::UnsupportedMnemonic: return "UnsupportedMnemonic";
        case ErrCode::MisalignedAccess: return "MisalignedAccess";
        case ErrCode::InstructionBudgetExceeded: return "InstructionBudgetExceeded";
        case ErrCode::StreamMismatch: return "StreamMismatch";
        case ErrCode::UnalignedLineCrossing: return "UnalignedLineCrossing";
        case ErrCode::ParseError: return "ParseError";
        case ErrCode::InconsistentControlFlow: return "InconsistentControlFlow";
        case ErrCode::EmptyStream: return "EmptyStream";
        case ErrCode::ParameterOutOfRange: return "ParameterOutOfRange";
        case ErrCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

std::string to_hex(u64 v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(v));
    return std::string(buf);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SimError(ErrCode::ParseError, "cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw SimError(ErrCode::ParseError, "cannot open " + path + " for writing");
    out << text;
    if (!out) throw SimError(ErrCode::ParseError, "short write to " + path);
}

}  // namespace rvsim
