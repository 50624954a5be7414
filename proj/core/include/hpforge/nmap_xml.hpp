#pragma once

#include <filesystem>
#include <string_view>

#include "hpforge/inventory.hpp"

namespace hpforge {

struct ScanImport {
    Inventory inventory;
    int skipped_without_ipv4 = 0;  // up-hosts dropped for lacking an IPv4 address
};

// Ingests scanner XML (nmap-compatible subset). One HostRecord per up-host;
// down hosts are omitted. Recognized pieces, everything else is ignored:
//
//   host[starttime]
//     status[state]
//     address[addr, addrtype in {ipv4, mac}]
//     ports/port[protocol=tcp, portid]/state[state=open]
//     os/osmatch[name]/osclass[vendor, osfamily, osgen, type]
//     uptime[seconds]
//
// The first osmatch supplies os_label and the os_name attribute; its first
// osclass supplies os_vendor, os_family, os_generation and device_type.
// Throws ParseError (with line/column) on malformed XML and Error when the
// document yields zero up-hosts.
ScanImport parse_scanner_xml(std::string_view xml_text, std::string source = "");

ScanImport load_scanner_xml(const std::filesystem::path& path);

}  // namespace hpforge
