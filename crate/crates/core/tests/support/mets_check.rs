//! Structural validation of emitted METS/ALTO without an XSD engine:
//! namespaces, allowed children, required attributes, ID uniqueness and
//! reference resolution.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use roxmltree::{Document, Node};

pub const METS_NS: &str = "http://www.loc.gov/METS/";
pub const ALTO_NS: &str = "http://www.loc.gov/standards/alto/ns-v2#";
pub const XLINK_NS: &str = "http://www.w3.org/1999/xlink";
pub const MODS_NS: &str = "http://www.loc.gov/mods/v3";

/// Content references of one logical article, in document order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleRefs {
    pub order: usize,
    pub headings: Vec<String>,
    pub lines: Vec<String>,
}

type Rules = &'static [(&'static str, &'static [&'static str], &'static [&'static str])];

/// (element, allowed children, required attributes)
const METS_RULES: Rules = &[
    ("mets", &["metsHdr", "dmdSec", "fileSec", "structMap"], &["OBJID", "TYPE"]),
    ("metsHdr", &["agent"], &[]),
    ("agent", &["name", "note"], &["ROLE"]),
    ("name", &[], &[]),
    ("note", &[], &[]),
    ("dmdSec", &["mdWrap"], &["ID"]),
    ("mdWrap", &["xmlData"], &["MDTYPE"]),
    ("xmlData", &["mods"], &[]),
    ("fileSec", &["fileGrp"], &[]),
    ("fileGrp", &["file"], &["USE"]),
    ("file", &["FLocat"], &["ID", "MIMETYPE"]),
    ("FLocat", &[], &["LOCTYPE"]),
    ("structMap", &["div"], &["TYPE"]),
    ("div", &["div", "fptr"], &["ID", "TYPE"]),
    ("fptr", &["area", "seq"], &[]),
    ("seq", &["area"], &[]),
    ("area", &[], &["FILEID", "BEGIN", "BETYPE"]),
];

const ALTO_RULES: Rules = &[
    ("alto", &["Description", "Layout"], &[]),
    ("Description", &["MeasurementUnit", "sourceImageInformation", "OCRProcessing"], &[]),
    ("MeasurementUnit", &[], &[]),
    ("sourceImageInformation", &["fileName"], &[]),
    ("fileName", &[], &[]),
    ("OCRProcessing", &["ocrProcessingStep"], &["ID"]),
    ("ocrProcessingStep", &["processingStepDescription", "processingStepSettings", "processingSoftware"], &[]),
    ("processingStepDescription", &[], &[]),
    ("processingStepSettings", &[], &[]),
    ("processingSoftware", &["softwareName", "softwareVersion"], &[]),
    ("softwareName", &[], &[]),
    ("softwareVersion", &[], &[]),
    ("Layout", &["Page"], &[]),
    ("Page", &["PrintSpace"], &["ID", "PHYSICAL_IMG_NR", "WIDTH", "HEIGHT"]),
    ("PrintSpace", &["TextBlock"], &["HPOS", "VPOS", "WIDTH", "HEIGHT"]),
    ("TextBlock", &["TextLine"], &["ID", "HPOS", "VPOS", "WIDTH", "HEIGHT"]),
    ("TextLine", &["String"], &["ID", "HPOS", "VPOS", "WIDTH", "HEIGHT"]),
    ("String", &[], &["CONTENT", "HPOS", "VPOS", "WIDTH", "HEIGHT"]),
];

const NUMERIC: &[&str] = &["HPOS", "VPOS", "WIDTH", "HEIGHT", "PHYSICAL_IMG_NR", "ORDER"];

fn check_tree(node: Node, ns: &str, rules: Rules, ids: &mut BTreeSet<String>) -> Result<(), String> {
    let name = node.tag_name().name();
    let Some(&(_, children, required)) = rules.iter().find(|r| r.0 == name) else {
        return Err(format!("unexpected element <{name}>"));
    };
    if node.tag_name().namespace() != Some(ns) {
        return Err(format!("<{name}> not in namespace {ns}"));
    }
    for attr in required {
        if node.attribute(*attr).is_none() {
            return Err(format!("<{name}> lacks required attribute {attr}"));
        }
    }
    for attr in NUMERIC {
        if let Some(v) = node.attribute(*attr) {
            if v.parse::<u64>().is_err() {
                return Err(format!("<{name} {attr}=\"{v}\"> is not a non-negative integer"));
            }
        }
    }
    if let Some(id) = node.attribute("ID") {
        if !ids.insert(id.to_string()) {
            return Err(format!("duplicate ID {id}"));
        }
    }
    for child in node.children().filter(|c| c.is_element()) {
        let cname = child.tag_name().name();
        if cname == "mods" && name == "xmlData" {
            if child.tag_name().namespace() != Some(MODS_NS) {
                return Err("MODS record outside the MODS namespace".into());
            }
            continue;
        }
        if !children.contains(&cname) {
            return Err(format!("<{cname}> not allowed in <{name}>"));
        }
        check_tree(child, ns, rules, ids)?;
    }
    Ok(())
}

fn attr_u64(n: Node, a: &str) -> u64 {
    n.attribute(a).and_then(|v| v.parse().ok()).unwrap_or(0)
}

/// Validates one ALTO page and returns its IDs.
pub fn check_alto(xml: &str) -> Result<BTreeSet<String>, String> {
    let doc = Document::parse(xml).map_err(|e| format!("ALTO not well-formed: {e}"))?;
    let root = doc.root_element();
    let mut ids = BTreeSet::new();
    check_tree(root, ALTO_NS, ALTO_RULES, &mut ids)?;
    let page = root.descendants().find(|n| n.has_tag_name((ALTO_NS, "Page"))).ok_or("ALTO without Page")?;
    let (w, h) = (attr_u64(page, "WIDTH"), attr_u64(page, "HEIGHT"));
    for n in root.descendants().filter(|n| n.attribute("HPOS").is_some()) {
        let x1 = attr_u64(n, "HPOS") + attr_u64(n, "WIDTH");
        let y1 = attr_u64(n, "VPOS") + attr_u64(n, "HEIGHT");
        if x1 > w || y1 > h {
            return Err(format!("<{}> extends past the page", n.tag_name().name()));
        }
    }
    Ok(ids)
}

/// Validates a METS file against its ALTO pages (keyed by the href used in
/// the file section) and returns the articles in document order.
pub fn check_issue(mets: &str, altos: &BTreeMap<String, String>) -> Result<Vec<ArticleRefs>, String> {
    let doc = Document::parse(mets).map_err(|e| format!("METS not well-formed: {e}"))?;
    let root = doc.root_element();
    let mut ids = BTreeSet::new();
    check_tree(root, METS_NS, METS_RULES, &mut ids)?;

    let mut alto_ids: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut file_ids = BTreeSet::new();
    for file in root.descendants().filter(|n| n.has_tag_name((METS_NS, "file"))) {
        let id = file.attribute("ID").unwrap().to_string();
        let loc = file.children().find(|c| c.has_tag_name((METS_NS, "FLocat"))).ok_or("file without FLocat")?;
        let href = loc.attribute((XLINK_NS, "href")).ok_or_else(|| format!("FLocat of {id} lacks xlink:href"))?;
        if file.parent().and_then(|g| g.attribute("USE")) == Some("ALTO") {
            let xml = altos.get(href).ok_or_else(|| format!("ALTO {href} not provided"))?;
            alto_ids.insert(id.clone(), check_alto(xml)?);
        }
        file_ids.insert(id);
    }
    for fptr in root.descendants().filter(|n| n.has_tag_name((METS_NS, "fptr"))) {
        if let Some(f) = fptr.attribute("FILEID") {
            if !file_ids.contains(f) {
                return Err(format!("fptr references unknown file {f}"));
            }
        }
    }
    for area in root.descendants().filter(|n| n.has_tag_name((METS_NS, "area"))) {
        let file = area.attribute("FILEID").unwrap();
        let begin = area.attribute("BEGIN").unwrap();
        let targets = alto_ids.get(file).ok_or_else(|| format!("area references non-ALTO file {file}"))?;
        if !targets.contains(begin) {
            return Err(format!("area {begin} not found in {file}"));
        }
    }

    let maps: Vec<Node> = root.children().filter(|n| n.has_tag_name((METS_NS, "structMap"))).collect();
    let types: Vec<&str> = maps.iter().filter_map(|m| m.attribute("TYPE")).collect();
    if types != ["PHYSICAL", "LOGICAL"] {
        return Err(format!("structMaps {types:?}"));
    }
    let mut articles = Vec::new();
    for div in maps[1].descendants().filter(|n| n.has_tag_name((METS_NS, "div")) && n.attribute("TYPE") == Some("ARTICLE")) {
        let order = attr_u64(div, "ORDER") as usize;
        if order != articles.len() + 1 {
            return Err(format!("article ORDER {order} at position {}", articles.len() + 1));
        }
        let mut refs = ArticleRefs { order, headings: Vec::new(), lines: Vec::new() };
        for part in div.children().filter(|n| n.is_element()) {
            let begins = part
                .descendants()
                .filter(|n| n.has_tag_name((METS_NS, "area")))
                .map(|a| a.attribute("BEGIN").unwrap().to_string());
            match part.attribute("TYPE") {
                Some("HEADING") => refs.headings.extend(begins),
                Some("BODY") => refs.lines.extend(begins),
                other => return Err(format!("unexpected article part {other:?}")),
            }
        }
        articles.push(refs);
    }
    let mut seen = BTreeSet::new();
    for line in articles.iter().flat_map(|a| &a.lines) {
        if !seen.insert(line) {
            return Err(format!("line {line} belongs to two articles"));
        }
    }
    let all_lines: BTreeSet<&String> =
        alto_ids.values().flatten().filter(|id| id.contains("_TL")).collect();
    if seen != all_lines {
        return Err(format!("{} ALTO lines, {} referenced by articles", all_lines.len(), seen.len()));
    }
    Ok(articles)
}
