#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace rvsim {

using u8 = std::uint8_t;
using u16 = std::uint16_t;
using u32 = std::uint32_t;
using u64 = std::uint64_t;
using i8 = std::int8_t;
using i16 = std::int16_t;
using i32 = std::int32_t;
using i64 = std::int64_t;

enum class ErrCode {
    UnsupportedEncoding,
    IllegalInstruction,
    OperandOutOfRange,
    UnsupportedMnemonic,
    MisalignedAccess,
    InstructionBudgetExceeded,
    StreamMismatch,
    UnalignedLineCrossing,
    ParseError,
    InconsistentControlFlow,
    EmptyStream,
    ParameterOutOfRange,
    ConfigError,
};

const char* err_code_name(ErrCode c);

// All fatal simulator errors carry a machine-checkable code plus context.
class SimError : public std::runtime_error {
  public:
    SimError(ErrCode code, const std::string& what)
        : std::runtime_error(std::string(err_code_name(code)) + ": " + what), code_(code) {}
    ErrCode code() const { return code_; }

  private:
    ErrCode code_;
};

// splitmix64: deterministic across platforms, unlike std:: distributions.
inline u64 splitmix64(u64& state) {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(u64 seed) : state_(seed) {}
    u64 next() { return splitmix64(state_); }
    // Uniform in [0, n) without modulo bias mattering for our n << 2^64 uses.
    u64 below(u64 n) { return n ? next() % n : 0; }
    double unit() { return (next() >> 11) * (1.0 / 9007199254740992.0); }

  private:
    u64 state_;
};

// Order-sensitive digest: chain of splitmix64 rounds over the fed words.
class Digest {
  public:
    void feed(u64 v) {
        state_ ^= v;
        acc_ = splitmix64(state_);
    }
    u64 value() const { return acc_; }

  private:
    u64 state_ = 0x6a09e667f3bcc908ULL;
    u64 acc_ = 0;
};

std::string to_hex(u64 v);

std::string read_text_file(const std::string& path);            // throws ParseError
void write_text_file(const std::string& path, const std::string& text);

}  // namespace rvsim
