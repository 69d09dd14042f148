#pragma once

#include <fraisse/age.hh>
#include <fraisse/bundle.hh>
#include <fraisse/construct.hh>
#include <fraisse/generic.hh>
#include <fraisse/mho.hh>
#include <fraisse/partition.hh>

#include <json.hpp>

#include <string>

namespace fraisse
{
    using Json = nlohmann::json;

    /// Stamped into every file and report.
    inline constexpr const char * version_tag = "fraisse-0.1.0";

    /// Malformed input; the message names the offending location.
    class IoError : public std::runtime_error
    {
        public:
            using std::runtime_error::runtime_error;
    };

    /// Two-space indented, keys sorted, trailing newline.
    auto canonical(const Json & j) -> std::string;

    auto read_json(const std::string & path) -> Json;
    auto write_json(const std::string & path, const Json & j) -> void;

    /// Wraps a payload as {"kind", "version", ...payload}.
    auto document(const std::string & kind, Json payload) -> Json;
    /// Checks the kind and version of a document.
    auto expect_kind(const Json & doc, const std::string & kind, const std::string & where) -> void;

    auto signature_json(const Signature & sig) -> Json;
    auto parse_signature(const Json & j, const std::string & where) -> SignaturePtr;

    /// {"size", "relations": [[symbol name, [entries]], ...]}; the signature is stored alongside.
    auto structure_json(const FinStructure & s) -> Json;
    auto parse_structure(const Json & j, const SignaturePtr & sig, const std::string & where) -> FinStructure;

    auto boundary_json(const BoundarySpec & spec) -> Json;
    auto parse_boundary(const Json & j, const std::string & where) -> BoundarySpec;

    auto type_json(const TypeDescriptor & t) -> Json;
    auto parse_type(const Json & j, const SignaturePtr & sig, const std::string & where) -> TypeDescriptor;

    auto bundle_json(const Bundle & b) -> Json;
    auto parse_bundle(const Json & j, const SignaturePtr & sig, const std::string & where) -> Bundle;

    auto mho_json(const MhoInstance & inst) -> Json;
    auto parse_mho(const Json & j, const std::string & where) -> MhoInstance;

    auto generator_json(const GeneratorConfig & c) -> Json;
    auto parse_generator(const Json & j, const std::string & where) -> GeneratorConfig;

    /// The age of a boundary document, or of the "boundary" member of a
    /// snapshot document.
    auto load_age(const Json & doc, const std::string & where) -> AgePtr;

    /// Snapshot documents carry the boundary, the generator config and the structure.
    auto snapshot_json(const GenericStructure & g) -> Json;

    auto classifier_json(const ClassifierReport & r) -> Json;
    auto pqr_json(const PQRPartition & p) -> Json;
    auto construct_json(const ConstructResult & r) -> Json;
    auto dichotomy_json(const DichotomyResult & d) -> Json;
    auto weak_json(const WeakRun & w) -> Json;
    auto labelling_json(const Labelling & l) -> Json;
    auto largeness_json(const Largeness & l) -> Json;
    auto constructive_json(const ConstructiveSet & c) -> Json;
    auto audit_json(const MhoAudit & a) -> Json;
}
