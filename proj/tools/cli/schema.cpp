#include "cli.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace hyperlab::cli {

namespace {

const std::set<std::string> annotation_keywords = {"$schema", "$id", "title", "description", "default", "examples"};
const std::set<std::string> assertion_keywords = {"type",     "properties", "required",        "additionalProperties",
                                                  "enum",     "const",      "minimum",         "maximum",
                                                  "exclusiveMinimum",       "exclusiveMaximum", "items",
                                                  "minItems", "maxItems"};

std::string escape_pointer(const std::string& key)
{
    std::string out;
    for (char c : key) {
        if (c == '~')
            out += "~0";
        else if (c == '/')
            out += "~1";
        else
            out += c;
    }
    return out;
}

bool has_type(const json& doc, const std::string& type)
{
    if (type == "object")
        return doc.is_object();
    if (type == "array")
        return doc.is_array();
    if (type == "string")
        return doc.is_string();
    if (type == "boolean")
        return doc.is_boolean();
    if (type == "null")
        return doc.is_null();
    if (type == "number")
        return doc.is_number();
    if (type == "integer") {
        if (doc.is_number_integer())
            return true;
        // JSON Schema counts 2.0 as an integer.
        return doc.is_number_float() && std::isfinite(doc.get<double>()) && std::trunc(doc.get<double>()) == doc.get<double>();
    }
    throw std::logic_error("schema: unknown type '" + type + "'");
}

class Validator {
public:
    std::vector<SchemaIssue> issues;

    void check(const json& schema, const json& doc, const std::string& path)
    {
        for (const auto& [key, _] : schema.items())
            if (!annotation_keywords.contains(key) && !assertion_keywords.contains(key))
                throw std::logic_error("schema: unsupported keyword '" + key + "' at " + path);

        if (schema.contains("type")) {
            const auto& t = schema["type"];
            bool ok = false;
            if (t.is_array()) {
                for (const auto& alt : t)
                    ok = ok || has_type(doc, alt.get<std::string>());
            } else {
                ok = has_type(doc, t.get<std::string>());
            }
            if (!ok) {
                fail(path, "expected " + t.dump() + ", got " + std::string(doc.type_name()));
                return;
            }
        }
        if (schema.contains("const") && doc != schema["const"])
            fail(path, "must equal " + schema["const"].dump());
        if (schema.contains("enum")) {
            bool found = false;
            for (const auto& e : schema["enum"])
                found = found || e == doc;
            if (!found)
                fail(path, "must be one of " + schema["enum"].dump());
        }
        if (doc.is_number())
            check_number(schema, doc.get<double>(), path);
        if (doc.is_object())
            check_object(schema, doc, path);
        if (doc.is_array())
            check_array(schema, doc, path);
    }

private:
    void fail(const std::string& path, std::string message) { issues.push_back({path.empty() ? "/" : path, std::move(message)}); }

    void check_number(const json& schema, double v, const std::string& path)
    {
        if (!std::isfinite(v))
            fail(path, "must be finite");
        if (schema.contains("minimum") && !(v >= schema["minimum"].get<double>()))
            fail(path, "must be >= " + schema["minimum"].dump());
        if (schema.contains("maximum") && !(v <= schema["maximum"].get<double>()))
            fail(path, "must be <= " + schema["maximum"].dump());
        if (schema.contains("exclusiveMinimum") && !(v > schema["exclusiveMinimum"].get<double>()))
            fail(path, "must be > " + schema["exclusiveMinimum"].dump());
        if (schema.contains("exclusiveMaximum") && !(v < schema["exclusiveMaximum"].get<double>()))
            fail(path, "must be < " + schema["exclusiveMaximum"].dump());
    }

    void check_object(const json& schema, const json& doc, const std::string& path)
    {
        if (schema.contains("required"))
            for (const auto& r : schema["required"])
                if (!doc.contains(r.get<std::string>()))
                    fail(path + "/" + escape_pointer(r.get<std::string>()), "required property missing");
        const json* props = schema.contains("properties") ? &schema["properties"] : nullptr;
        const bool closed = schema.contains("additionalProperties") && schema["additionalProperties"] == false;
        for (const auto& [key, value] : doc.items()) {
            const std::string sub = path + "/" + escape_pointer(key);
            if (props && props->contains(key))
                check((*props)[key], value, sub);
            else if (closed)
                fail(sub, "unknown field");
            else if (schema.contains("additionalProperties") && schema["additionalProperties"].is_object())
                check(schema["additionalProperties"], value, sub);
        }
    }

    void check_array(const json& schema, const json& doc, const std::string& path)
    {
        if (schema.contains("minItems") && doc.size() < schema["minItems"].get<std::size_t>())
            fail(path, "needs at least " + schema["minItems"].dump() + " items");
        if (schema.contains("maxItems") && doc.size() > schema["maxItems"].get<std::size_t>())
            fail(path, "allows at most " + schema["maxItems"].dump() + " items");
        if (schema.contains("items"))
            for (std::size_t i = 0; i < doc.size(); ++i)
                check(schema["items"], doc[i], path + "/" + std::to_string(i));
    }
};

} // namespace

std::vector<SchemaIssue> validate(const json& schema, const json& doc)
{
    Validator v;
    v.check(schema, doc, "");
    return v.issues;
}

json apply_defaults(const json& schema, json doc)
{
    if (!doc.is_object() || !schema.contains("properties"))
        return doc;
    for (const auto& [key, sub] : schema["properties"].items()) {
        if (!doc.contains(key) && sub.contains("default"))
            doc[key] = sub["default"];
        if (doc.contains(key))
            doc[key] = apply_defaults(sub, doc[key]);
    }
    return doc;
}

} // namespace hyperlab::cli
