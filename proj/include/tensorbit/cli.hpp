#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tensorbit/orbits.hpp"
#include "tensorbit/tensor.hpp"

namespace tensorbit {

/// Malformed command line or tensor document (exit code 2).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Request that cannot be satisfied for this input (exit code 4).
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

enum class DocKind { Full222, Sym222, PxPx2 };

const char* to_string(DocKind k);
std::optional<DocKind> doc_kind_from_string(std::string_view s);

/// Flat tensor data: [a..h] slab-major for full222, [a,b,c,d] for sym222,
/// p followed by X1 and X2 row-major for pxpx2.
struct TensorDocument {
    DocKind kind = DocKind::Full222;
    std::vector<double> data;
    std::string label;

    int p() const;
    Tensor222 full() const;    // full222, sym222 and pxpx2 with p = 2
    SymTensor222 sym() const;  // sym222, or symmetric full222
    TensorPxPx2 pxpx2() const; // any kind
    bool operator==(const TensorDocument&) const = default;
};

/// Validates length and finiteness; throws InputError.
TensorDocument parse_document(const nlohmann::json& j);
TensorDocument parse_document_text(std::string_view text);
/// Comma-separated values; the kind is inferred from the length when absent.
TensorDocument parse_inline(std::string_view csv, std::optional<DocKind> kind = std::nullopt);
nlohmann::ordered_json to_json(const TensorDocument& doc);

/// Indented JSON; floats with 17 significant digits when full_precision,
/// otherwise the shortest representation that round-trips. Non-finite
/// numbers print as null.
std::string dump_json(const nlohmann::ordered_json& j, bool full_precision);

/// Entry point of the tensorbit tool. Exit codes: 0 success, 2 input error,
/// 3 numerical failure, 4 infeasible request.
int run_cli(int argc, const char* const argv[], std::ostream& out, std::ostream& err);

} // namespace tensorbit
