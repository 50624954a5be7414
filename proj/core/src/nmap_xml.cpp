#include "hpforge/nmap_xml.hpp"

#include <expat.h>

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "hpforge/errors.hpp"

namespace hpforge {

namespace {

std::string_view attr_value(const char** atts, const char* name) {
    for (const char** a = atts; *a != nullptr; a += 2) {
        if (std::strcmp(a[0], name) == 0) return a[1];
    }
    return {};
}

// Host under construction. Committed on </host> when the status was "up".
struct PendingHost {
    bool up = false;
    std::optional<Ipv4> ipv4;
    std::optional<Mac> mac;
    std::optional<std::uint64_t> uptime_seconds;
    std::int64_t scan_time = 0;
    std::set<std::uint16_t> open_ports;
    std::map<std::string, std::string> fingerprint;
    std::optional<std::string> os_label;
};

struct ParserState {
    XML_Parser parser = nullptr;
    Inventory inventory;
    int skipped_without_ipv4 = 0;
    std::set<std::string> used_ids;

    int host_depth = 0;  // nesting depth relative to the current <host>
    bool in_host = false;
    PendingHost host;

    bool in_ports = false;
    int current_port = -1;  // portid of the open <port protocol="tcp"> being read

    bool in_os = false;
    bool in_first_osmatch = false;
    bool osmatch_seen = false;
    bool osclass_taken = false;

    // Deferred error; expat handlers cannot throw across the C boundary.
    std::optional<std::string> failure;

    void fail(std::string message) {
        if (!failure) failure = std::move(message);
        XML_StopParser(parser, XML_FALSE);
    }
};

template <typename T>
bool parse_number(std::string_view text, T& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc() && result.ptr == last;
}

void handle_host_child(ParserState& st, std::string_view name, const char** atts) {
    if (name == "status") {
        st.host.up = attr_value(atts, "state") == "up";
    } else if (name == "address") {
        const auto type = attr_value(atts, "addrtype");
        const auto addr = attr_value(atts, "addr");
        if (type == "ipv4") {
            const auto parsed = Ipv4::try_parse(addr);
            if (!parsed) return st.fail("invalid IPv4 address \"" + std::string(addr) + "\"");
            st.host.ipv4 = parsed;
        } else if (type == "mac") {
            const auto parsed = Mac::try_parse(addr);
            if (!parsed) return st.fail("invalid MAC address \"" + std::string(addr) + "\"");
            st.host.mac = parsed;
        }
    } else if (name == "ports") {
        st.in_ports = true;
    } else if (name == "port" && st.in_ports) {
        st.current_port = -1;
        if (attr_value(atts, "protocol") != "tcp") return;
        int port = 0;
        const auto id = attr_value(atts, "portid");
        if (!parse_number(id, port) || port < 1 || port > 65535)
            return st.fail("invalid portid \"" + std::string(id) + "\"");
        st.current_port = port;
    } else if (name == "state" && st.current_port > 0) {
        if (attr_value(atts, "state") == "open")
            st.host.open_ports.insert(static_cast<std::uint16_t>(st.current_port));
    } else if (name == "os") {
        st.in_os = true;
    } else if (name == "osmatch" && st.in_os) {
        if (st.osmatch_seen) {
            st.in_first_osmatch = false;
            return;
        }
        st.osmatch_seen = true;
        st.in_first_osmatch = true;
        const auto os_name = attr_value(atts, "name");
        if (!os_name.empty()) {
            st.host.os_label = std::string(os_name);
            st.host.fingerprint["os_name"] = std::string(os_name);
        }
    } else if (name == "osclass" && st.in_first_osmatch && !st.osclass_taken) {
        st.osclass_taken = true;
        const auto put = [&](const char* attr, const char* dim) {
            const auto v = attr_value(atts, attr);
            if (!v.empty()) st.host.fingerprint[dim] = std::string(v);
        };
        put("vendor", "os_vendor");
        put("osfamily", "os_family");
        put("osgen", "os_generation");
        put("type", "device_type");
    } else if (name == "uptime") {
        std::uint64_t seconds = 0;
        const auto text = attr_value(atts, "seconds");
        if (!parse_number(text, seconds))
            return st.fail("invalid uptime seconds \"" + std::string(text) + "\"");
        st.host.uptime_seconds = seconds;
    }
}

void XMLCALL on_start(void* user, const char* raw_name, const char** atts) {
    auto& st = *static_cast<ParserState*>(user);
    if (st.failure) return;
    const std::string_view name = raw_name;

    if (!st.in_host) {
        if (name == "host") {
            st.in_host = true;
            st.host_depth = 1;
            st.host = PendingHost{};
            st.in_ports = false;
            st.current_port = -1;
            st.in_os = false;
            st.in_first_osmatch = false;
            st.osmatch_seen = false;
            st.osclass_taken = false;
            const auto start = attr_value(atts, "starttime");
            if (!start.empty()) {
                std::int64_t t = 0;
                if (!parse_number(start, t))
                    return st.fail("invalid host starttime \"" + std::string(start) + "\"");
                st.host.scan_time = t;
            }
        }
        return;
    }

    ++st.host_depth;
    handle_host_child(st, name, atts);
}

void commit_host(ParserState& st) {
    if (!st.host.up) return;
    if (!st.host.ipv4) {
        ++st.skipped_without_ipv4;
        return;
    }

    HostRecord record;
    record.ipv4 = *st.host.ipv4;
    record.mac = st.host.mac;
    record.uptime_seconds = st.host.uptime_seconds;
    record.scan_time = st.host.scan_time;
    record.open_tcp_ports.assign(st.host.open_ports.begin(), st.host.open_ports.end());
    record.fingerprint = std::move(st.host.fingerprint);
    record.os_label = std::move(st.host.os_label);

    // Host ids are the dotted quad; rare duplicates get a #n suffix.
    std::string id = record.ipv4.to_string();
    for (int n = 2; !st.used_ids.insert(id).second; ++n)
        id = record.ipv4.to_string() + "#" + std::to_string(n);
    record.id = std::move(id);

    st.inventory.scan_time = std::max(st.inventory.scan_time, record.scan_time);
    st.inventory.hosts.push_back(std::move(record));
}

void XMLCALL on_end(void* user, const char* raw_name) {
    auto& st = *static_cast<ParserState*>(user);
    if (st.failure || !st.in_host) return;
    const std::string_view name = raw_name;

    --st.host_depth;
    if (st.host_depth == 0) {
        st.in_host = false;
        commit_host(st);
        return;
    }
    if (name == "ports") st.in_ports = false;
    if (name == "port") st.current_port = -1;
    if (name == "os") st.in_os = false;
    if (name == "osmatch") st.in_first_osmatch = false;
}

}  // namespace

ScanImport parse_scanner_xml(std::string_view xml_text, std::string source) {
    XML_Parser parser = XML_ParserCreate(nullptr);
    if (parser == nullptr) throw Error("failed to create XML parser");

    ParserState state;
    state.parser = parser;
    XML_SetUserData(parser, &state);
    XML_SetElementHandler(parser, on_start, on_end);

    const auto status = XML_Parse(parser, xml_text.data(), static_cast<int>(xml_text.size()), XML_TRUE);
    const int line = static_cast<int>(XML_GetCurrentLineNumber(parser));
    const int column = static_cast<int>(XML_GetCurrentColumnNumber(parser)) + 1;
    const XML_Error code = XML_GetErrorCode(parser);
    XML_ParserFree(parser);

    if (state.failure) throw ParseError(*state.failure, line, column);
    if (status != XML_STATUS_OK)
        throw ParseError(std::string("malformed XML: ") + XML_ErrorString(code), line, column);
    if (state.inventory.hosts.empty())
        throw Error("empty inventory: the document contains no up-hosts with an IPv4 address");

    state.inventory.source = source.empty() ? "<stream>" : std::move(source);
    validate(state.inventory);

    ScanImport result;
    result.inventory = std::move(state.inventory);
    result.skipped_without_ipv4 = state.skipped_without_ipv4;
    return result;
}

ScanImport load_scanner_xml(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open \"" + path.string() + "\"");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scanner_xml(buffer.str(), path.string());
}

}  // namespace hpforge
