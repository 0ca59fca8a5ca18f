#include "ranlstm/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ranlstm {

static_assert(std::endian::native == std::endian::little,
              "checkpoint io assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'N', 'L', 'S'};
constexpr std::uint16_t kVersion = 1;

std::string spec_block(const LstmModel& model) {
    std::ostringstream out;
    const ArchSpec& spec = model.spec();
    out << "name=" << spec.name << "\n";
    out << "hidden_dims=";
    for (std::size_t i = 0; i < spec.hidden_dims.size(); ++i)
        out << (i ? "," : "") << spec.hidden_dims[i];
    out << "\n";
    out << "input_features=" << spec.d_x << "\n";
    out << "window=" << spec.window_len << "\n";
    out << "seed=" << model.seed << "\n";
    out << "trained_epochs=" << model.trained_epochs << "\n";
    return out.str();
}

long long parse_ll(const std::string& value, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw CheckpointSpecError("spec block: key '" + key + "' has non-integer value '" +
                                  value + "'");
    }
}

}  // namespace

void save_checkpoint(const LstmModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 4);
    const std::uint16_t version = kVersion;
    out.write(reinterpret_cast<const char*>(&version), sizeof version);
    const std::string spec = spec_block(model);
    const std::uint32_t spec_len = static_cast<std::uint32_t>(spec.size());
    out.write(reinterpret_cast<const char*>(&spec_len), sizeof spec_len);
    out.write(spec.data(), static_cast<std::streamsize>(spec.size()));
    const std::uint64_t n = model.params().size();
    out.write(reinterpret_cast<const char*>(&n), sizeof n);
    out.write(reinterpret_cast<const char*>(model.params().data()),
              static_cast<std::streamsize>(n * sizeof(double)));
    if (!out) throw std::runtime_error("write failed: " + path);
}

LstmModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);

    auto read_exact = [&](void* dst, std::size_t bytes, const char* what) {
        in.read(static_cast<char*>(dst), static_cast<std::streamsize>(bytes));
        if (static_cast<std::size_t>(in.gcount()) != bytes)
            throw CheckpointTruncatedError(path + ": truncated while reading " +
                                           std::string(what));
    };

    char magic[4];
    read_exact(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw CheckpointFormatError(path + ": bad magic, not a model checkpoint");
    std::uint16_t version = 0;
    read_exact(&version, sizeof version, "version");
    if (version != kVersion)
        throw CheckpointFormatError(path + ": unsupported format version " +
                                    std::to_string(version));

    std::uint32_t spec_len = 0;
    read_exact(&spec_len, sizeof spec_len, "spec length");
    std::string spec_text(spec_len, '\0');
    if (spec_len > 0) read_exact(spec_text.data(), spec_len, "spec block");

    ArchSpec spec;
    std::uint64_t seed = 0;
    long long trained_epochs = 0;
    bool have_name = false, have_dims = false, have_dx = false, have_window = false;
    std::istringstream lines(spec_text);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw CheckpointSpecError(path + ": malformed spec line '" + line + "'");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "name") {
            spec.name = value;
            have_name = true;
        } else if (key == "hidden_dims") {
            std::istringstream ss(value);
            std::string cell;
            while (std::getline(ss, cell, ','))
                spec.hidden_dims.push_back(static_cast<int>(parse_ll(cell, key)));
            have_dims = true;
        } else if (key == "input_features") {
            spec.d_x = static_cast<int>(parse_ll(value, key));
            have_dx = true;
        } else if (key == "window") {
            spec.window_len = static_cast<int>(parse_ll(value, key));
            have_window = true;
        } else if (key == "seed") {
            seed = static_cast<std::uint64_t>(parse_ll(value, key));
        } else if (key == "trained_epochs") {
            trained_epochs = parse_ll(value, key);
        } else {
            throw CheckpointSpecError(path + ": unknown spec key '" + key + "'");
        }
    }
    if (!have_name || !have_dims || !have_dx || !have_window)
        throw CheckpointSpecError(path + ": spec block missing required keys");
    try {
        spec.validate();
    } catch (const ConfigError& e) {
        throw CheckpointSpecError(path + ": invalid spec: " + e.what());
    }

    std::uint64_t declared = 0;
    read_exact(&declared, sizeof declared, "parameter count");
    const std::uint64_t expected = static_cast<std::uint64_t>(param_count(spec, true));
    if (declared != expected)
        throw CheckpointSpecError(path + ": declared parameter count " +
                                  std::to_string(declared) + " but spec requires " +
                                  std::to_string(expected));

    LstmModel model(spec);
    model.seed = seed;
    model.trained_epochs = static_cast<int>(trained_epochs);
    read_exact(model.params().data(), declared * sizeof(double), "parameters");
    in.peek();
    if (!in.eof())
        throw CheckpointFormatError(path + ": trailing bytes after the parameter payload");
    return model;
}

}  // namespace ranlstm
