//! Reader for the supported OWL subset.
//!
//! Accepted grammar (namespace prefixes such as `owl:`, `rdf:`, `rdfs:` are
//! stripped before matching; IRIs are reduced to the fragment after the last
//! `#` or `/`):
//!
//! ```text
//! document    := <Ontology> item* </Ontology>   (an <RDF> root is accepted too)
//! item        := class | individual
//! class       := <Class ID=id | about=id> member* </Class>
//! member      := <subClassOf resource=id/>
//!              | <equivalentClass resource=id/>
//!              | <unionOf parseType="Collection"> <Class about=id/>{2,} </unionOf>
//!              | <Individual ID=id/>
//! individual  := <Individual ID=id type=id/>     (also NamedIndividual, Thing)
//! ```
//!
//! Anything else inside the root or a class is skipped with an
//! `UNSUPPORTED_CONSTRUCT` warning.

use std::collections::{HashMap, HashSet};

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::diag::{Code, Diagnostic, Location};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwlDocument {
    pub classes: Vec<ClassDecl>,
    pub warnings: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub id: String,
    pub super_refs: Vec<String>,
    pub equivalent_refs: Vec<String>,
    pub union_members: Option<Vec<String>>,
    pub individuals: Vec<String>,
    pub location: Location,
}

impl ClassDecl {
    pub fn new(id: impl Into<String>) -> Self {
        ClassDecl {
            id: id.into(),
            super_refs: Vec::new(),
            equivalent_refs: Vec::new(),
            union_members: None,
            individuals: Vec::new(),
            location: Location::NONE,
        }
    }
}

impl OwlDocument {
    pub fn class(&self, id: &str) -> Option<&ClassDecl> {
        self.classes.iter().find(|c| c.id == id)
    }
}

// Minimal element tree; text, comments and processing instructions are dropped.
#[derive(Debug)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Element>,
    offset: usize,
}

impl Element {
    fn attr(&self, local: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == local)
            .map(|(_, v)| v.as_str())
    }
}

fn local_name(qname: &[u8]) -> String {
    let s = String::from_utf8_lossy(qname);
    match s.rfind(':') {
        Some(i) => s[i + 1..].to_string(),
        None => s.into_owned(),
    }
}

/// Reduces an IRI or bare name to the identifier part.
pub fn fragment(value: &str) -> &str {
    let v = value.trim();
    match v.rfind(['#', '/']) {
        Some(i) => &v[i + 1..],
        None => v,
    }
}

fn read_start(start: &BytesStart<'_>, offset: usize) -> Result<Element, String> {
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| e.to_string())?;
        let key = local_name(attr.key.as_ref());
        // namespace declarations are not data
        if attr.key.as_ref() == b"xmlns" || attr.key.as_ref().starts_with(b"xmlns:") {
            continue;
        }
        let value = attr.unescape_value().map_err(|e| e.to_string())?;
        attrs.push((key, value.into_owned()));
    }
    Ok(Element {
        name: local_name(start.name().as_ref()),
        attrs,
        children: Vec::new(),
        offset,
    })
}

fn build_tree(source: &str) -> Result<Element, Diagnostic> {
    let mut reader = Reader::from_str(source);
    reader.config_mut().check_end_names = true;
    let malformed = |offset: usize, msg: String| {
        Diagnostic::error(
            Code::MalformedXml,
            Location::from_offset(source, offset),
            msg,
        )
    };

    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;
    loop {
        let before = reader.buffer_position() as usize;
        let event = reader.read_event().map_err(|e| {
            malformed(
                reader.error_position() as usize,
                format!("malformed XML: {e}"),
            )
        })?;
        match event {
            Event::Start(s) => {
                if root.is_some() && stack.is_empty() {
                    return Err(malformed(before, "content after the root element".into()));
                }
                let el = read_start(&s, before)
                    .map_err(|m| malformed(before, format!("malformed XML: {m}")))?;
                stack.push(el);
            }
            Event::Empty(s) => {
                let el = read_start(&s, before)
                    .map_err(|m| malformed(before, format!("malformed XML: {m}")))?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None if root.is_none() => root = Some(el),
                    None => return Err(malformed(before, "content after the root element".into())),
                }
            }
            Event::End(_) => {
                let el = stack.pop().expect("end names are checked by the reader");
                match stack.last_mut() {
                    Some(parent) => parent.children.push(el),
                    None => root = Some(el),
                }
            }
            Event::Eof => {
                if let Some(open) = stack.last() {
                    return Err(malformed(
                        source.len(),
                        format!(
                            "unexpected end of input: element <{}> is not closed",
                            open.name
                        ),
                    ));
                }
                return root.ok_or_else(|| malformed(0, "document has no root element".into()));
            }
            _ => {}
        }
    }
}

struct Ingest<'a> {
    source: &'a str,
    diags: Vec<Diagnostic>,
    classes: Vec<ClassDecl>,
    // individuals declared at top level: (id, type, offset)
    typed_individuals: Vec<(String, String, usize)>,
}

impl<'a> Ingest<'a> {
    fn loc(&self, offset: usize) -> Location {
        Location::from_offset(self.source, offset)
    }

    fn unsupported(&mut self, el: &Element, context: &str) {
        let loc = self.loc(el.offset);
        self.diags.push(Diagnostic::warning(
            Code::UnsupportedConstruct,
            loc,
            format!("unsupported construct <{}> in {context}; skipped", el.name),
        ));
    }

    fn identifier(&mut self, el: &Element, keys: &[&str]) -> Option<String> {
        let raw = keys.iter().find_map(|k| el.attr(k));
        match raw.map(fragment) {
            Some(id) if !id.is_empty() => Some(id.to_string()),
            _ => {
                let loc = self.loc(el.offset);
                self.diags.push(Diagnostic::error(
                    Code::MissingIdentifier,
                    loc,
                    format!(
                        "<{}> needs a non-empty {} attribute",
                        el.name,
                        keys.join(" or ")
                    ),
                ));
                None
            }
        }
    }

    fn root(&mut self, root: &Element) {
        match root.name.as_str() {
            "Ontology" => self.items(root),
            "RDF" => {
                for child in &root.children {
                    if child.name == "Ontology" {
                        // ontology header inside rdf:RDF; only its children matter
                        self.header(child);
                    } else {
                        self.item(child);
                    }
                }
            }
            other => {
                let loc = self.loc(root.offset);
                self.diags.push(Diagnostic::error(
                    Code::UnexpectedRoot,
                    loc,
                    format!("expected <Ontology> or <RDF> root element, found <{other}>"),
                ));
            }
        }
    }

    fn header(&mut self, header: &Element) {
        for child in &header.children {
            self.unsupported(child, "ontology header");
        }
    }

    fn items(&mut self, parent: &Element) {
        for child in &parent.children {
            self.item(child);
        }
    }

    fn item(&mut self, el: &Element) {
        match el.name.as_str() {
            "Class" => self.class(el),
            "Individual" | "NamedIndividual" | "Thing" => {
                let Some(id) = self.identifier(el, &["ID", "about"]) else {
                    return;
                };
                match el.attr("type").map(fragment) {
                    Some(ty) if !ty.is_empty() => {
                        self.typed_individuals.push((id, ty.to_string(), el.offset));
                    }
                    _ => {
                        let loc = self.loc(el.offset);
                        self.diags.push(Diagnostic::error(
                            Code::MissingIdentifier,
                            loc,
                            format!("top-level <{}> `{id}` needs a type attribute", el.name),
                        ));
                    }
                }
            }
            _ => self.unsupported(el, "ontology"),
        }
    }

    fn class(&mut self, el: &Element) {
        let Some(id) = self.identifier(el, &["ID", "about"]) else {
            return;
        };
        let mut decl = ClassDecl::new(id.clone());
        decl.location = self.loc(el.offset);
        let mut seen_union = false;
        for child in &el.children {
            match child.name.as_str() {
                "subClassOf" | "equivalentClass" => {
                    let target = child
                        .attr("resource")
                        .map(fragment)
                        .filter(|s| !s.is_empty());
                    match target {
                        Some(t) if child.children.is_empty() => {
                            if child.name == "subClassOf" {
                                decl.super_refs.push(t.to_string());
                            } else {
                                decl.equivalent_refs.push(t.to_string());
                            }
                        }
                        _ => self.unsupported(
                            child,
                            &format!("class `{id}` (only resource references are supported)"),
                        ),
                    }
                }
                "unionOf" => {
                    if seen_union {
                        let loc = self.loc(child.offset);
                        self.diags.push(Diagnostic::error(
                            Code::MultipleUnion,
                            loc,
                            format!("class `{id}` has more than one <unionOf>"),
                        ));
                        continue;
                    }
                    seen_union = true;
                    decl.union_members = self.union(&id, child);
                }
                "Individual" | "NamedIndividual" | "Thing" => {
                    let Some(ind) = self.identifier(child, &["ID", "about"]) else {
                        continue;
                    };
                    if let Some(ty) = child.attr("type").map(fragment) {
                        if ty != id {
                            let loc = self.loc(child.offset);
                            self.diags.push(Diagnostic::warning(
                                Code::UnsupportedConstruct,
                                loc,
                                format!("nested individual `{ind}` declares type `{ty}`; the enclosing class `{id}` is used"),
                            ));
                        }
                    }
                    push_individual(&mut decl, ind, self.loc(child.offset), &mut self.diags);
                }
                _ => self.unsupported(child, &format!("class `{id}`")),
            }
        }
        self.classes.push(decl);
    }

    fn union(&mut self, class_id: &str, el: &Element) -> Option<Vec<String>> {
        if el.attr("parseType") != Some("Collection") {
            self.unsupported(
                el,
                &format!("class `{class_id}` (unionOf needs parseType=\"Collection\")"),
            );
            return None;
        }
        let mut members: Vec<String> = Vec::new();
        for child in &el.children {
            if child.name != "Class" {
                self.unsupported(child, &format!("unionOf of class `{class_id}`"));
                continue;
            }
            let Some(m) = self.identifier(child, &["about", "ID"]) else {
                continue;
            };
            if members.contains(&m) {
                let loc = self.loc(child.offset);
                self.diags.push(Diagnostic::warning(
                    Code::UnsupportedConstruct,
                    loc,
                    format!("`{m}` listed twice in unionOf of `{class_id}`; duplicate ignored"),
                ));
                continue;
            }
            members.push(m);
        }
        if members.len() < 2 {
            let loc = self.loc(el.offset);
            self.diags.push(Diagnostic::error(
                Code::UnionTooSmall,
                loc,
                format!(
                    "unionOf of `{class_id}` needs at least two distinct classes, found {}",
                    members.len()
                ),
            ));
            return None;
        }
        Some(members)
    }

    fn finish(mut self) -> Result<OwlDocument, Vec<Diagnostic>> {
        let mut seen: HashMap<String, Location> = HashMap::new();
        let mut duplicates = Vec::new();
        for c in &self.classes {
            if let Some(first) = seen.get(&c.id) {
                duplicates.push(Diagnostic::error(
                    Code::DuplicateClass,
                    c.location,
                    format!("class `{}` is already declared at {first}", c.id),
                ));
            } else {
                seen.insert(c.id.clone(), c.location);
            }
        }
        self.diags.extend(duplicates);

        let typed = std::mem::take(&mut self.typed_individuals);
        for (ind, ty, offset) in typed {
            let loc = self.loc(offset);
            match self.classes.iter_mut().find(|c| c.id == ty) {
                Some(decl) => push_individual(decl, ind, loc, &mut self.diags),
                None => self.diags.push(Diagnostic::error(
                    Code::DanglingReference,
                    loc,
                    format!("individual `{ind}` has type `{ty}`, which is never declared"),
                )),
            }
        }

        let declared: HashSet<&str> = self.classes.iter().map(|c| c.id.as_str()).collect();
        let mut dangling = Vec::new();
        for c in &self.classes {
            let refs = c
                .super_refs
                .iter()
                .chain(&c.equivalent_refs)
                .chain(c.union_members.iter().flatten());
            for r in refs {
                if !declared.contains(r.as_str()) {
                    dangling.push(Diagnostic::error(
                        Code::DanglingReference,
                        c.location,
                        format!("class `{}` refers to `{r}`, which is never declared", c.id),
                    ));
                }
            }
        }
        self.diags.extend(dangling);

        if crate::diag::has_errors(&self.diags) {
            Err(self.diags)
        } else {
            Ok(OwlDocument {
                classes: self.classes,
                warnings: self.diags,
            })
        }
    }
}

fn push_individual(decl: &mut ClassDecl, ind: String, loc: Location, diags: &mut Vec<Diagnostic>) {
    if decl.individuals.contains(&ind) {
        diags.push(Diagnostic::warning(
            Code::DuplicateIndividual,
            loc,
            format!(
                "individual `{ind}` assigned to `{}` twice; duplicate ignored",
                decl.id
            ),
        ));
    } else {
        decl.individuals.push(ind);
    }
}

/// Parses an OWL document in the supported subset.
///
/// On failure every diagnostic gathered so far is returned, warnings included.
/// Malformed XML yields exactly one `MALFORMED_XML` error.
pub fn parse_owl(source: &str) -> Result<OwlDocument, Vec<Diagnostic>> {
    let root = build_tree(source).map_err(|d| vec![d])?;
    let mut ingest = Ingest {
        source,
        diags: Vec::new(),
        classes: Vec::new(),
        typed_individuals: Vec::new(),
    };
    ingest.root(&root);
    ingest.finish()
}
