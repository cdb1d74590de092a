// Copyright 2026 The sfip Authors
// SPDX-License-Identifier: Apache-2.0

#include "sfip/bundle.hpp"

#include <array>
#include <fstream>
#include <iterator>

#include "sfip/errors.hpp"

namespace sfip {

namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'S', 'F', 'I', 'P'};
constexpr std::uint16_t kModeTransitions = 1U << 0;
constexpr std::uint16_t kModeOrigins = 1U << 1;
// Upper bound on N accepted from a file, so a corrupted header cannot
// request an enormous allocation.
constexpr std::uint32_t kMaxTableSize = 1U << 16;

class Writer {
  public:
    void bytes(std::span<const std::uint8_t> data) { out_.insert(out_.end(), data.begin(), data.end()); }
    void u16(std::uint16_t v) { le(v, 2); }
    void u32(std::uint32_t v) { le(v, 4); }
    void u64(std::uint64_t v) { le(v, 8); }
    Bytes take() && { return std::move(out_); }
    const Bytes& view() const { return out_; }

  private:
    void le(std::uint64_t v, int width) {
        for (int i = 0; i < width; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    Bytes out_;
};

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

    std::size_t position() const { return pos_; }
    std::size_t remaining() const { return data_.size() - pos_; }

    void need(std::size_t count, const char* what) const {
        if (remaining() < count) {
            throw BundleError(BundleError::Kind::Truncated, std::string("bundle truncated while reading ") + what);
        }
    }
    std::span<const std::uint8_t> bytes(std::size_t count, const char* what) {
        need(count, what);
        auto out = data_.subspan(pos_, count);
        pos_ += count;
        return out;
    }
    std::uint16_t u16(const char* what) { return static_cast<std::uint16_t>(le(2, what)); }
    std::uint32_t u32(const char* what) { return static_cast<std::uint32_t>(le(4, what)); }
    std::uint64_t u64(const char* what) { return le(8, what); }

  private:
    std::uint64_t le(int width, const char* what) {
        need(static_cast<std::size_t>(width), what);
        std::uint64_t v = 0;
        for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += static_cast<std::size_t>(width);
        return v;
    }
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

struct Header {
    std::uint16_t version;
    std::uint16_t mode;
    std::uint32_t n;
    std::string source;
};

Header read_header(Reader& in) {
    const auto magic = in.bytes(kMagic.size(), "magic");
    if (!std::equal(magic.begin(), magic.end(), kMagic.begin())) {
        throw BundleError(BundleError::Kind::BadMagic, "not an sfip bundle (bad magic)");
    }
    Header h;
    h.version = in.u16("version");
    if (h.version != kFormatVersion) {
        throw BundleError(BundleError::Kind::VersionMismatch, "unsupported bundle version " + std::to_string(h.version) +
                                                                  " (expected " + std::to_string(kFormatVersion) + ")");
    }
    h.mode = in.u16("mode");
    h.n = in.u32("table size");
    const auto source_length = in.u32("provenance length");
    const auto source = in.bytes(source_length, "provenance");
    h.source.assign(source.begin(), source.end());
    return h;
}

} // namespace

EnforcementMode parse_mode(std::string_view text) {
    if (text == "transitions") return EnforcementMode::transitions();
    if (text == "origins") return EnforcementMode::origins();
    if (text == "both") return EnforcementMode::both();
    throw ParseError("unknown enforcement mode '" + std::string(text) + "'", 0, 0);
}

std::string to_string(EnforcementMode mode) {
    if (mode.check_transitions && mode.check_origins) return "both";
    if (mode.check_transitions) return "transitions";
    if (mode.check_origins) return "origins";
    return "none";
}

void Bundle::check_consistent() const {
    if (state_machine.size() != origin_map.size()) {
        throw ContractViolation("bundle inconsistent: matrix N=" + std::to_string(state_machine.size()) +
                                " but origin map N=" + std::to_string(origin_map.size()));
    }
    if (!mode_hint.valid()) throw ContractViolation("bundle mode hint has no checks enabled");
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : bytes) {
        hash ^= b;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

Bytes save_bundle(const Bundle& bundle) {
    bundle.check_consistent();
    Writer out;
    out.bytes(kMagic);
    out.u16(kFormatVersion);
    out.u16(static_cast<std::uint16_t>((bundle.mode_hint.check_transitions ? kModeTransitions : 0) |
                                       (bundle.mode_hint.check_origins ? kModeOrigins : 0)));
    const std::uint32_t n = bundle.state_machine.size();
    out.u32(n);
    const auto& source = bundle.provenance.source;
    out.u32(static_cast<std::uint32_t>(source.size()));
    out.bytes(std::span(reinterpret_cast<const std::uint8_t*>(source.data()), source.size()));

    for (auto word : bundle.state_machine.words()) out.u64(word);

    std::uint32_t records = 0;
    for (SyscallNumber s = 0; s < n; ++s) records += bundle.origin_map.addresses(s).empty() ? 0 : 1;
    out.u32(records);
    for (SyscallNumber s = 0; s < n; ++s) {
        const auto addresses = bundle.origin_map.addresses(s);
        if (addresses.empty()) continue;
        out.u32(s);
        out.u32(static_cast<std::uint32_t>(addresses.size()));
        for (Address a : addresses) out.u64(a);
    }
    out.u64(fnv1a64(out.view()));
    return std::move(out).take();
}

SegmentExtent matrix_segment(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    const Header h = read_header(in);
    const std::size_t length = (static_cast<std::size_t>(h.n) + 1) * words_for_bits(h.n) * 8;
    in.need(length, "matrix");
    return {in.position(), length};
}

Bundle load_bundle(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    const Header h = read_header(in);
    if (h.n == 0 || h.n > kMaxTableSize) {
        throw BundleError(BundleError::Kind::Malformed, "implausible syscall table size " + std::to_string(h.n));
    }
    const std::size_t words = (static_cast<std::size_t>(h.n) + 1) * words_for_bits(h.n);
    in.need(words * 8, "matrix");
    std::vector<std::uint64_t> matrix(words);
    for (auto& w : matrix) w = in.u64("matrix");

    const auto records = in.u32("origin record count");
    struct Record {
        std::uint32_t number;
        std::vector<Address> addresses;
    };
    std::vector<Record> decoded;
    for (std::uint32_t r = 0; r < records; ++r) {
        Record rec;
        rec.number = in.u32("origin record");
        const auto count = in.u32("origin record");
        in.need(static_cast<std::size_t>(count) * 8, "origin addresses");
        rec.addresses.resize(count);
        for (auto& a : rec.addresses) a = in.u64("origin addresses");
        decoded.push_back(std::move(rec));
    }
    const std::size_t body_end = in.position();
    const auto stored = in.u64("checksum");
    if (in.remaining() != 0) throw BundleError(BundleError::Kind::Malformed, "trailing bytes after checksum");
    if (fnv1a64(bytes.first(body_end)) != stored) {
        throw BundleError(BundleError::Kind::ChecksumMismatch, "bundle checksum mismatch");
    }

    // Content checks run only on checksum-verified data.
    if ((h.mode & ~(kModeTransitions | kModeOrigins)) != 0 || (h.mode & (kModeTransitions | kModeOrigins)) == 0) {
        throw BundleError(BundleError::Kind::Malformed, "invalid mode flags");
    }
    Bundle bundle;
    try {
        bundle.state_machine = SyscallStateMachine::from_words(h.n, std::move(matrix));
    } catch (const ContractViolation& e) {
        throw BundleError(BundleError::Kind::Malformed, e.what());
    }
    bundle.origin_map = OriginMapAbsolute(h.n);
    std::int64_t previous_number = -1;
    for (const auto& rec : decoded) {
        if (rec.number >= h.n || static_cast<std::int64_t>(rec.number) <= previous_number || rec.addresses.empty()) {
            throw BundleError(BundleError::Kind::Malformed, "origin records unsorted, empty, or out of range");
        }
        previous_number = rec.number;
        for (std::size_t i = 1; i < rec.addresses.size(); ++i) {
            if (rec.addresses[i] <= rec.addresses[i - 1]) {
                throw BundleError(BundleError::Kind::Malformed, "origin addresses not strictly increasing");
            }
        }
        for (Address a : rec.addresses) bundle.origin_map.insert(rec.number, a);
    }
    bundle.mode_hint = {(h.mode & kModeTransitions) != 0, (h.mode & kModeOrigins) != 0};
    bundle.provenance = {h.source, h.version};
    return bundle;
}

Bundle read_bundle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open bundle '" + path + "'");
    Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return load_bundle(bytes);
}

void write_bundle_file(const std::string& path, const Bundle& bundle) {
    const Bytes bytes = save_bundle(bundle);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write bundle '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("failed writing bundle '" + path + "'");
}

} // namespace sfip
