#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>
#include <tuple>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <openssl/evp.h>

#include "iaa/difficulty.hpp"
#include "json.hpp"

namespace iaa {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
    return v ? ordered_json(*v) : ordered_json(nullptr);
}

std::optional<double> read_optional_number(const nlohmann::json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (v.is_null()) return std::nullopt;
    if (!v.is_number()) throw Error(ErrorKind::InvalidArgument, std::string("registry field '") + key + "' must be a number or null");
    return v.get<double>();
}

std::string to_hex(const unsigned char* bytes, unsigned int len) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(digits[bytes[i] >> 4]);
        out.push_back(digits[bytes[i] & 0x0f]);
    }
    return out;
}

}  // namespace

const BaselineRecord* BaselineRegistry::find(std::string_view doc_class) const {
    auto it = std::find_if(records.begin(), records.end(),
                           [&](const BaselineRecord& r) { return r.doc_class == doc_class; });
    return it == records.end() ? nullptr : &*it;
}

std::string dataset_digest(const ReliabilityData& data) {
    auto records = data.to_records();
    std::sort(records.begin(), records.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
        return std::tie(a.doc_class, a.doc_id, a.item_id, a.annotator_id, a.label) <
               std::tie(b.doc_class, b.doc_id, b.item_id, b.annotator_id, b.label);
    });
    std::string canonical;
    for (const auto& r : records) {
        canonical += ordered_json::array({r.doc_class, r.doc_id, r.item_id, r.annotator_id, r.label}).dump();
        canonical += '\n';
    }

    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(canonical.data(), canonical.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::Io, "SHA-256 computation failed");
    }
    return to_hex(digest, len);
}

std::string current_timestamp() {
    std::time_t t{};
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
        t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
    } else {
        t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

BaselineRegistry registry_upsert(const BaselineRegistry& registry, const std::string& doc_class,
                                 const ReliabilityData& data, const std::string& recorded_at,
                                 const ProfileOptions& options) {
    AgreementProfile p;
    try {
        p = profile(data, options);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::EmptyDataset) throw;
        throw Error(ErrorKind::InsufficientPairs, "class '" + doc_class + "' has no unit labeled twice");
    }

    BaselineRecord record{doc_class,          p.krippendorff_alpha, p.cohen_kappa, p.fleiss_kappa,
                          p.percent_agreement, p.n_units,           p.n_annotators, recorded_at,
                          dataset_digest(data)};

    BaselineRegistry next = registry;
    auto it = std::find_if(next.records.begin(), next.records.end(),
                           [&](const BaselineRecord& r) { return r.doc_class == doc_class; });
    if (it != next.records.end()) {
        *it = std::move(record);
    } else {
        next.records.push_back(std::move(record));
    }
    std::sort(next.records.begin(), next.records.end(),
              [](const BaselineRecord& a, const BaselineRecord& b) { return a.doc_class < b.doc_class; });
    return next;
}

std::string registry_to_json(const BaselineRegistry& registry) {
    ordered_json doc;
    doc["version"] = 1;
    doc["records"] = ordered_json::array();
    for (const auto& r : registry.records) {
        ordered_json rec;
        rec["doc_class"] = r.doc_class;
        rec["alpha"] = optional_number(r.alpha);
        rec["cohen"] = optional_number(r.cohen);
        rec["fleiss"] = optional_number(r.fleiss);
        rec["percent_agreement"] = r.percent_agreement;
        rec["n_units"] = r.n_units;
        rec["n_annotators"] = r.n_annotators;
        rec["recorded_at"] = r.recorded_at;
        rec["dataset_digest"] = r.dataset_digest;
        doc["records"].push_back(std::move(rec));
    }
    return doc.dump(2) + "\n";
}

BaselineRegistry registry_from_json(std::string_view text) {
    BaselineRegistry registry;
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("version").get<int>() != 1) {
            throw Error(ErrorKind::InvalidArgument, "unsupported registry version");
        }
        for (const auto& rec : doc.at("records")) {
            BaselineRecord r;
            r.doc_class = rec.at("doc_class").get<std::string>();
            r.alpha = read_optional_number(rec, "alpha");
            r.cohen = read_optional_number(rec, "cohen");
            r.fleiss = read_optional_number(rec, "fleiss");
            r.percent_agreement = rec.at("percent_agreement").get<double>();
            r.n_units = rec.at("n_units").get<std::size_t>();
            r.n_annotators = rec.at("n_annotators").get<std::size_t>();
            r.recorded_at = rec.at("recorded_at").get<std::string>();
            r.dataset_digest = rec.at("dataset_digest").get<std::string>();
            if (registry.find(r.doc_class)) {
                throw Error(ErrorKind::InvalidArgument, "registry lists class '" + r.doc_class + "' twice");
            }
            registry.records.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::InvalidArgument, std::string("malformed registry: ") + e.what());
    }
    std::sort(registry.records.begin(), registry.records.end(),
              [](const BaselineRecord& a, const BaselineRecord& b) { return a.doc_class < b.doc_class; });
    return registry;
}

BaselineRegistry load_registry(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) return {};
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read registry " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return registry_from_json(buf.str());
}

void save_registry(const std::filesystem::path& path, const BaselineRegistry& registry) {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out << registry_to_json(registry);
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw Error(ErrorKind::Io, "cannot replace " + path.string() + ": " + ec.message());
    }
}

RegistryLock::RegistryLock(const std::filesystem::path& registry_path) {
    auto lock_path = registry_path;
    lock_path += ".lock";
    fd_ = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorKind::Io, "cannot open lock file " + lock_path.string());
    if (::flock(fd_, LOCK_EX) != 0) {
        ::close(fd_);
        throw Error(ErrorKind::Io, "cannot lock " + lock_path.string());
    }
}

RegistryLock::~RegistryLock() {
    if (fd_ >= 0) {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }
}

}  // namespace iaa
