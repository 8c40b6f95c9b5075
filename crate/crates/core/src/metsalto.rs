//! METS/ALTO serialization.
//!
//! Each page becomes an ALTO 2.x document listing its text blocks (the
//! retained grid boxes), their text lines and the title blocks. The issue
//! becomes a METS 1.x document whose logical structure map lists the
//! articles in reading order, each pointing into the ALTO files.

use std::collections::{BTreeMap, BTreeSet};

use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::Writer;
use serde::{Deserialize, Serialize};

use crate::articles::Article;
use crate::error::MetsError;
use crate::geometry::Rect;

pub const ALTO_NS: &str = "http://www.loc.gov/standards/alto/ns-v2#";
pub const ALTO_SCHEMA: &str = "http://www.loc.gov/standards/alto/alto-v2.0.xsd";
pub const METS_NS: &str = "http://www.loc.gov/METS/";
pub const METS_SCHEMA: &str = "http://www.loc.gov/standards/mets/mets.xsd";
pub const MODS_NS: &str = "http://www.loc.gov/mods/v3";
pub const XLINK_NS: &str = "http://www.w3.org/1999/xlink";
pub const XSI_NS: &str = "http://www.w3.org/2001/XMLSchema-instance";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineLayout {
    pub id: usize,
    pub bbox: Rect,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockLayout {
    pub id: usize,
    pub bbox: Rect,
    pub lines: Vec<LineLayout>,
}

/// Physical layout of one page, as serialized.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageLayout {
    pub width: u32,
    pub height: u32,
    /// Reference to the source image, relative to the issue directory.
    pub image_ref: String,
    pub blocks: Vec<BlockLayout>,
    pub headings: Vec<LineLayout>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IssueDocument {
    pub issue_id: String,
    /// ISO-8601 issue date.
    pub date: Option<String>,
    pub pages: Vec<PageLayout>,
    pub articles: Vec<Article>,
}

pub fn page_prefix(page: usize) -> String {
    format!("P{:04}", page + 1)
}

pub fn block_id(page: usize, id: usize) -> String {
    format!("{}_TB{:04}", page_prefix(page), id)
}

pub fn line_id(page: usize, id: usize) -> String {
    format!("{}_TL{:04}", page_prefix(page), id)
}

pub fn heading_id(page: usize, id: usize) -> String {
    format!("{}_HD{:04}", page_prefix(page), id)
}

fn heading_line_id(page: usize, id: usize) -> String {
    format!("{}_HL{:04}", page_prefix(page), id)
}

pub fn alto_file_id(page: usize) -> String {
    format!("ALTO{:04}", page + 1)
}

pub fn image_file_id(page: usize) -> String {
    format!("IMG{:04}", page + 1)
}

/// Path of a page's ALTO file relative to the issue directory.
pub fn alto_path(page: usize) -> String {
    format!("alto/p{:04}.xml", page + 1)
}

struct Xml {
    w: Writer<Vec<u8>>,
}

type Attrs<'a> = &'a [(&'a str, String)];

impl Xml {
    fn new() -> Self {
        let mut w = Writer::new_with_indent(Vec::new(), b' ', 2);
        w.write_event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))
            .expect("write to memory");
        Xml { w }
    }

    fn start<'a>(name: &'a str, attrs: Attrs<'a>) -> BytesStart<'a> {
        let mut e = BytesStart::new(name);
        for (k, v) in attrs {
            e.push_attribute((*k, v.as_str()));
        }
        e
    }

    fn open(&mut self, name: &str, attrs: Attrs<'_>) {
        self.w.write_event(Event::Start(Self::start(name, attrs))).expect("write to memory");
    }

    fn empty(&mut self, name: &str, attrs: Attrs<'_>) {
        self.w.write_event(Event::Empty(Self::start(name, attrs))).expect("write to memory");
    }

    fn close(&mut self, name: &str) {
        self.w.write_event(Event::End(BytesEnd::new(name))).expect("write to memory");
    }

    fn text(&mut self, name: &str, attrs: Attrs<'_>, text: &str) {
        self.w.write_event(Event::Start(Self::start(name, attrs))).expect("write to memory");
        self.w.write_event(Event::Text(BytesText::new(text))).expect("write to memory");
        self.w.write_event(Event::End(BytesEnd::new(name))).expect("write to memory");
    }

    fn finish(self) -> String {
        let mut s = String::from_utf8(self.w.into_inner()).expect("utf-8 output");
        s.push('\n');
        s
    }
}

fn geometry_attrs(id: String, r: &Rect) -> Vec<(&'static str, String)> {
    vec![
        ("ID", id),
        ("HPOS", r.x0.to_string()),
        ("VPOS", r.y0.to_string()),
        ("WIDTH", r.width().to_string()),
        ("HEIGHT", r.height().to_string()),
    ]
}

fn empty_string(x: &mut Xml, r: &Rect) {
    let mut attrs = geometry_attrs(String::new(), r);
    attrs[0] = ("CONTENT", String::new());
    x.empty("String", &attrs);
}

fn software_description(x: &mut Xml) {
    x.text(
        "processingStepDescription",
        &[],
        "layout analysis and article segmentation; text content left to an external OCR step",
    );
    x.text(
        "processingStepSettings",
        &[],
        &format!("newsseg {}; ALTO 2.0; METS 1.x", env!("CARGO_PKG_VERSION")),
    );
    x.open("processingSoftware", &[]);
    x.text("softwareName", &[], "newsseg");
    x.text("softwareVersion", &[], env!("CARGO_PKG_VERSION"));
    x.close("processingSoftware");
}

/// ALTO document for page `page` (0-based) of an issue.
pub fn emit_alto(page: usize, layout: &PageLayout) -> String {
    let mut x = Xml::new();
    x.open(
        "alto",
        &[
            ("xmlns", ALTO_NS.to_string()),
            ("xmlns:xsi", XSI_NS.to_string()),
            ("xsi:schemaLocation", format!("{ALTO_NS} {ALTO_SCHEMA}")),
        ],
    );
    x.open("Description", &[]);
    x.text("MeasurementUnit", &[], "pixel");
    x.open("sourceImageInformation", &[]);
    x.text("fileName", &[], &layout.image_ref);
    x.close("sourceImageInformation");
    x.open("OCRProcessing", &[("ID", "OCR_0".to_string())]);
    x.open("ocrProcessingStep", &[]);
    software_description(&mut x);
    x.close("ocrProcessingStep");
    x.close("OCRProcessing");
    x.close("Description");

    x.open("Layout", &[]);
    let prefix = page_prefix(page);
    x.open(
        "Page",
        &[
            ("ID", prefix.clone()),
            ("PHYSICAL_IMG_NR", (page + 1).to_string()),
            ("WIDTH", layout.width.to_string()),
            ("HEIGHT", layout.height.to_string()),
        ],
    );
    let print = Rect::new(0, 0, layout.width as i32, layout.height as i32);
    let print_attrs = geometry_attrs(format!("{prefix}_PS"), &print);
    if layout.blocks.is_empty() && layout.headings.is_empty() {
        x.empty("PrintSpace", &print_attrs);
    } else {
        x.open("PrintSpace", &print_attrs);
        for h in &layout.headings {
            x.open("TextBlock", &geometry_attrs(heading_id(page, h.id), &h.bbox));
            x.open("TextLine", &geometry_attrs(heading_line_id(page, h.id), &h.bbox));
            empty_string(&mut x, &h.bbox);
            x.close("TextLine");
            x.close("TextBlock");
        }
        for b in &layout.blocks {
            x.open("TextBlock", &geometry_attrs(block_id(page, b.id), &b.bbox));
            for l in &b.lines {
                x.open("TextLine", &geometry_attrs(line_id(page, l.id), &l.bbox));
                empty_string(&mut x, &l.bbox);
                x.close("TextLine");
            }
            x.close("TextBlock");
        }
        x.close("PrintSpace");
    }
    x.close("Page");
    x.close("Layout");
    x.close("alto");
    x.finish()
}

/// Element ids present in each page's ALTO document.
fn physical_ids(issue: &IssueDocument) -> Vec<BTreeSet<String>> {
    issue
        .pages
        .iter()
        .enumerate()
        .map(|(p, layout)| {
            let mut ids = BTreeSet::new();
            for h in &layout.headings {
                ids.insert(heading_id(p, h.id));
            }
            for b in &layout.blocks {
                ids.insert(block_id(p, b.id));
                for l in &b.lines {
                    ids.insert(line_id(p, l.id));
                }
            }
            ids
        })
        .collect()
}

fn area(x: &mut Xml, page: usize, begin: String) {
    x.empty(
        "mets:area",
        &[("FILEID", alto_file_id(page)), ("BEGIN", begin), ("BETYPE", "IDREF".to_string())],
    );
}

/// METS document for the issue. Fails if an article refers to an element
/// missing from the physical layout.
pub fn emit_mets(issue: &IssueDocument) -> Result<String, MetsError> {
    let physical = physical_ids(issue);
    let resolve = |page: usize, id: String| -> Result<String, MetsError> {
        match physical.get(page) {
            Some(ids) if ids.contains(&id) => Ok(id),
            _ => Err(MetsError::DanglingReference(id)),
        }
    };

    let mut articles: Vec<&Article> = issue.articles.iter().collect();
    articles.sort_by_key(|a| a.reading_index);

    let mut x = Xml::new();
    x.open(
        "mets:mets",
        &[
            ("xmlns:mets", METS_NS.to_string()),
            ("xmlns:mods", MODS_NS.to_string()),
            ("xmlns:xlink", XLINK_NS.to_string()),
            ("xmlns:xsi", XSI_NS.to_string()),
            ("xsi:schemaLocation", format!("{METS_NS} {METS_SCHEMA}")),
            ("OBJID", issue.issue_id.clone()),
            ("TYPE", "Newspaper".to_string()),
        ],
    );
    x.open("mets:metsHdr", &[]);
    x.open(
        "mets:agent",
        &[("ROLE", "CREATOR".into()), ("TYPE", "OTHER".into()), ("OTHERTYPE", "SOFTWARE".into())],
    );
    x.text("mets:name", &[], &format!("newsseg {}", env!("CARGO_PKG_VERSION")));
    x.text("mets:note", &[], "ALTO 2.0; METS 1.x");
    x.close("mets:agent");
    x.close("mets:metsHdr");

    if let Some(date) = &issue.date {
        x.open("mets:dmdSec", &[("ID", "DMD_ISSUE".into())]);
        x.open("mets:mdWrap", &[("MDTYPE", "MODS".into())]);
        x.open("mets:xmlData", &[]);
        x.open("mods:mods", &[]);
        x.open("mods:originInfo", &[]);
        x.text("mods:dateIssued", &[("encoding", "iso8601".into())], date);
        x.close("mods:originInfo");
        x.close("mods:mods");
        x.close("mets:xmlData");
        x.close("mets:mdWrap");
        x.close("mets:dmdSec");
    }

    x.open("mets:fileSec", &[]);
    for (use_, mime) in [("IMAGE", None), ("ALTO", Some("text/xml"))] {
        x.open("mets:fileGrp", &[("USE", use_.into())]);
        for (p, layout) in issue.pages.iter().enumerate() {
            let (id, href, mime) = match mime {
                None => (image_file_id(p), layout.image_ref.clone(), image_mime(&layout.image_ref)),
                Some(m) => (alto_file_id(p), alto_path(p), m),
            };
            x.open("mets:file", &[("ID", id), ("MIMETYPE", mime.into())]);
            x.empty("mets:FLocat", &[("LOCTYPE", "URL".into()), ("xlink:href", href)]);
            x.close("mets:file");
        }
        x.close("mets:fileGrp");
    }
    x.close("mets:fileSec");

    x.open("mets:structMap", &[("TYPE", "PHYSICAL".into())]);
    x.open("mets:div", &[("ID", "PHYS_ISSUE".into()), ("TYPE", "physSequence".into())]);
    for p in 0..issue.pages.len() {
        x.open(
            "mets:div",
            &[("ID", format!("PHYS{:04}", p + 1)), ("TYPE", "page".into()), ("ORDER", (p + 1).to_string())],
        );
        x.empty("mets:fptr", &[("FILEID", image_file_id(p))]);
        x.empty("mets:fptr", &[("FILEID", alto_file_id(p))]);
        x.close("mets:div");
    }
    x.close("mets:div");
    x.close("mets:structMap");

    x.open("mets:structMap", &[("TYPE", "LOGICAL".into())]);
    let mut issue_attrs = vec![("ID", "LOG_ISSUE".to_string()), ("TYPE", "Issue".to_string())];
    if issue.date.is_some() {
        issue_attrs.push(("DMDID", "DMD_ISSUE".to_string()));
    }
    x.open("mets:div", &issue_attrs);
    for a in articles {
        let art_id = format!("ART{:04}", a.reading_index + 1);
        x.open(
            "mets:div",
            &[
                ("ID", art_id.clone()),
                ("TYPE", "ARTICLE".into()),
                ("ORDER", (a.reading_index + 1).to_string()),
            ],
        );
        if let Some(t) = a.title {
            let begin = resolve(t.page, heading_id(t.page, t.id))?;
            x.open("mets:div", &[("ID", format!("{art_id}_HEAD")), ("TYPE", "HEADING".into())]);
            x.open("mets:fptr", &[]);
            area(&mut x, t.page, begin);
            x.close("mets:fptr");
            x.close("mets:div");
        }
        x.open("mets:div", &[("ID", format!("{art_id}_BODY")), ("TYPE", "BODY".into())]);
        // group lines by box, keeping article order
        let mut by_box: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
        let line_box = line_owner(issue);
        for l in &a.text_lines {
            let owner = line_box.get(&(l.page, l.id)).copied();
            let owner = owner.ok_or_else(|| MetsError::DanglingReference(line_id(l.page, l.id)))?;
            by_box.entry((l.page, owner)).or_default().push(l.id);
        }
        for b in &a.boxes {
            resolve(b.page, block_id(b.page, b.id))?;
            let Some(lines) = by_box.get(&(b.page, b.id)) else { continue };
            x.open("mets:fptr", &[]);
            x.open("mets:seq", &[]);
            for &l in lines {
                let begin = resolve(b.page, line_id(b.page, l))?;
                area(&mut x, b.page, begin);
            }
            x.close("mets:seq");
            x.close("mets:fptr");
        }
        x.close("mets:div");
        x.close("mets:div");
    }
    x.close("mets:div");
    x.close("mets:structMap");
    x.close("mets:mets");
    Ok(x.finish())
}

fn line_owner(issue: &IssueDocument) -> BTreeMap<(usize, usize), usize> {
    let mut owner = BTreeMap::new();
    for (p, layout) in issue.pages.iter().enumerate() {
        for b in &layout.blocks {
            for l in &b.lines {
                owner.insert((p, l.id), b.id);
            }
        }
    }
    owner
}

fn image_mime(path: &str) -> &'static str {
    let lower = path.to_ascii_lowercase();
    if lower.ends_with(".png") {
        "image/png"
    } else if lower.ends_with(".pgm") {
        "image/x-portable-graymap"
    } else {
        "application/octet-stream"
    }
}
