//! Parser for the GXL subset used by the IAM graph collections, plus the
//! companion XML collection manifests.
//!
//! Supported: one undirected graph per document, `node` elements with `attr`
//! children typed `float`, `int`, or `string`, and `edge` elements with
//! `from`/`to` references. Anything outside this subset is a hard parse
//! error; silent coercion hides data bugs.

use std::collections::HashMap;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use crate::error::{OdseError, Result};
use crate::graph::{Edge, LabelValue, LabeledGraph};

#[derive(Debug, Clone)]
enum AttrValue {
    Num(f64),
    Str(String),
}

fn line_of(bytes: &[u8], offset: usize) -> usize {
    bytes[..offset.min(bytes.len())]
        .iter()
        .filter(|&&b| b == b'\n')
        .count()
        + 1
}

fn parse_err(source_name: &str, bytes: &[u8], offset: usize, reason: impl Into<String>) -> OdseError {
    OdseError::Parse {
        source_name: source_name.to_string(),
        line: line_of(bytes, offset),
        reason: reason.into(),
    }
}

fn attribute(start: &BytesStart<'_>, name: &str) -> Option<String> {
    start.attributes().flatten().find_map(|a| {
        if a.key.as_ref() == name.as_bytes() {
            a.unescape_value().ok().map(|v| v.into_owned())
        } else {
            None
        }
    })
}

/// Maps a collected attribute list onto a label: all-numeric lists become a
/// real vector in document order, a single string becomes a symbol, mixed
/// lists become a composite keyed by attribute name.
fn label_from_attrs(attrs: &[(String, AttrValue)]) -> Option<LabelValue> {
    if attrs.is_empty() {
        return None;
    }
    if attrs.iter().all(|(_, v)| matches!(v, AttrValue::Num(_))) {
        let values = attrs
            .iter()
            .map(|(_, v)| match v {
                AttrValue::Num(f) => *f,
                AttrValue::Str(_) => unreachable!(),
            })
            .collect();
        return Some(LabelValue::RealVector(values));
    }
    if attrs.len() == 1 {
        if let AttrValue::Str(s) = &attrs[0].1 {
            return Some(LabelValue::Symbol(s.clone()));
        }
    }
    let mut subs = std::collections::BTreeMap::new();
    for (name, value) in attrs {
        let sub = match value {
            AttrValue::Num(f) => LabelValue::RealVector(vec![*f]),
            AttrValue::Str(s) => LabelValue::Symbol(s.clone()),
        };
        subs.insert(name.clone(), sub);
    }
    Some(LabelValue::Composite(subs))
}

/// Parses one GXL document into a labeled graph.
pub fn parse_gxl(bytes: &[u8], source_name: &str) -> Result<LabeledGraph> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let err = |offset: usize, reason: String| parse_err(source_name, bytes, offset, reason);

    let mut graph_id: Option<String> = None;
    let mut node_ids: HashMap<String, usize> = HashMap::new();
    let mut node_order: Vec<String> = Vec::new();
    let mut vertex_labels: Vec<LabelValue> = Vec::new();
    let mut edges: Vec<(String, String, Option<LabelValue>, usize)> = Vec::new();

    // Parser state for the element currently being filled.
    enum Holder {
        Node(String),
        Edge(String, String),
    }
    let mut holder: Option<Holder> = None;
    let mut attrs: Vec<(String, AttrValue)> = Vec::new();
    let mut current_attr: Option<(String, Option<String>, Option<String>)> = None; // name, type, text

    let mut buf = Vec::new();
    loop {
        let event = reader
            .read_event_into(&mut buf)
            .map_err(|e| err(reader.buffer_position() as usize, format!("malformed XML: {e}")))?;
        // Position after the event lands on the event's own line.
        let offset = reader.buffer_position() as usize;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(event, Event::Empty(_));
                match e.name().as_ref() {
                    b"gxl" => {}
                    b"graph" => {
                        if graph_id.is_some() {
                            return Err(err(offset, "multiple graph elements".into()));
                        }
                        if let Some(mode) = attribute(e, "edgemode") {
                            if mode.eq_ignore_ascii_case("directed") {
                                return Err(err(offset, "directed graphs are not supported".into()));
                            }
                        }
                        graph_id = Some(attribute(e, "id").unwrap_or_default());
                    }
                    b"node" => {
                        if graph_id.is_none() {
                            return Err(err(offset, "node outside a graph element".into()));
                        }
                        let id = attribute(e, "id")
                            .ok_or_else(|| err(offset, "node without id".into()))?;
                        if empty {
                            register_node(&mut node_ids, &mut node_order, &mut vertex_labels, id, &[])
                                .map_err(|r| err(offset, r))?;
                        } else {
                            holder = Some(Holder::Node(id));
                            attrs.clear();
                        }
                    }
                    b"edge" => {
                        if graph_id.is_none() {
                            return Err(err(offset, "edge outside a graph element".into()));
                        }
                        let from = attribute(e, "from")
                            .ok_or_else(|| err(offset, "edge without from".into()))?;
                        let to = attribute(e, "to")
                            .ok_or_else(|| err(offset, "edge without to".into()))?;
                        if empty {
                            edges.push((from, to, None, offset));
                        } else {
                            holder = Some(Holder::Edge(from, to));
                            attrs.clear();
                        }
                    }
                    b"attr" => {
                        if holder.is_none() {
                            return Err(err(offset, "attr outside a node or edge".into()));
                        }
                        let name = attribute(e, "name")
                            .ok_or_else(|| err(offset, "attr without name".into()))?;
                        if empty {
                            return Err(err(offset, format!("attr `{name}` has no typed value")));
                        }
                        current_attr = Some((name, None, None));
                    }
                    b"float" | b"int" | b"string" => {
                        let type_name =
                            String::from_utf8_lossy(e.name().as_ref()).into_owned();
                        match current_attr.as_mut() {
                            Some((_, ty @ None, _)) => *ty = Some(type_name),
                            Some((name, Some(_), _)) => {
                                return Err(err(
                                    offset,
                                    format!("attr `{name}` has more than one typed value"),
                                ))
                            }
                            None => {
                                return Err(err(offset, "typed value outside an attr".into()))
                            }
                        }
                        if empty {
                            // e.g. <string/>: an empty string value.
                            if let Some((_, Some(ty), text @ None)) = current_attr.as_mut() {
                                if ty == "string" {
                                    *text = Some(String::new());
                                }
                            }
                        }
                    }
                    other => {
                        return Err(err(
                            offset,
                            format!(
                                "unsupported element `{}`",
                                String::from_utf8_lossy(other)
                            ),
                        ))
                    }
                }
            }
            Event::Text(t) => {
                if let Some((_, Some(_), text)) = current_attr.as_mut() {
                    let value = t
                        .unescape()
                        .map_err(|e| err(offset, format!("bad text: {e}")))?;
                    *text = Some(value.into_owned());
                }
            }
            Event::End(ref e) => match e.name().as_ref() {
                b"attr" => {
                    let (name, ty, text) = current_attr.take().ok_or_else(|| {
                        err(offset, "attr close without matching open".into())
                    })?;
                    let ty = ty.ok_or_else(|| {
                        err(offset, format!("attr `{name}` has no typed value"))
                    })?;
                    let text = text.unwrap_or_default();
                    let value = match ty.as_str() {
                        "float" | "int" => AttrValue::Num(text.trim().parse::<f64>().map_err(
                            |_| err(offset, format!("attr `{name}`: bad numeric `{text}`")),
                        )?),
                        "string" => AttrValue::Str(text),
                        _ => unreachable!(),
                    };
                    attrs.push((name, value));
                }
                b"node" => {
                    let Some(Holder::Node(id)) = holder.take() else {
                        return Err(err(offset, "node close without matching open".into()));
                    };
                    register_node(&mut node_ids, &mut node_order, &mut vertex_labels, id, &attrs)
                        .map_err(|r| err(offset, r))?;
                    attrs.clear();
                }
                b"edge" => {
                    let Some(Holder::Edge(from, to)) = holder.take() else {
                        return Err(err(offset, "edge close without matching open".into()));
                    };
                    edges.push((from, to, label_from_attrs(&attrs), offset));
                    attrs.clear();
                }
                _ => {}
            },
            Event::Eof => break,
            // Declarations, comments, doctypes carry no graph content.
            _ => {}
        }
        buf.clear();
    }

    let graph_id = graph_id.ok_or_else(|| err(bytes.len(), "no graph element".into()))?;
    let mut resolved = Vec::with_capacity(edges.len());
    for (from, to, label, offset) in edges {
        let u = *node_ids
            .get(&from)
            .ok_or_else(|| err(offset, format!("edge references undeclared node `{from}`")))?;
        let v = *node_ids
            .get(&to)
            .ok_or_else(|| err(offset, format!("edge references undeclared node `{to}`")))?;
        resolved.push(Edge::new(u, v, label));
    }
    LabeledGraph::new(graph_id, vertex_labels, resolved).map_err(|e| OdseError::Parse {
        source_name: source_name.to_string(),
        line: 1,
        reason: e.to_string(),
    })
}

fn register_node(
    node_ids: &mut HashMap<String, usize>,
    node_order: &mut Vec<String>,
    vertex_labels: &mut Vec<LabelValue>,
    id: String,
    attrs: &[(String, AttrValue)],
) -> std::result::Result<(), String> {
    if node_ids.contains_key(&id) {
        return Err(format!("duplicate node id `{id}`"));
    }
    let label = label_from_attrs(attrs).unwrap_or_else(|| LabelValue::Symbol(String::new()));
    node_ids.insert(id.clone(), node_order.len());
    node_order.push(id);
    vertex_labels.push(label);
    Ok(())
}

/// Parses an XML collection manifest: every `print` element contributes a
/// (graph file, class label) pair, in document order.
pub fn parse_cxl(bytes: &[u8], source_name: &str) -> Result<Vec<(String, String)>> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let mut entries = Vec::new();
    let mut buf = Vec::new();
    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| {
            parse_err(source_name, bytes, reader.buffer_position() as usize, format!("malformed XML: {e}"))
        })?;
        let offset = reader.buffer_position() as usize;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) if e.name().as_ref() == b"print" => {
                let file = attribute(e, "file").ok_or_else(|| {
                    parse_err(source_name, bytes, offset, "print without file attribute")
                })?;
                let class = attribute(e, "class").ok_or_else(|| {
                    parse_err(source_name, bytes, offset, "print without class attribute")
                })?;
                entries.push((file, class));
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if entries.is_empty() {
        return Err(parse_err(source_name, bytes, 0, "no print entries"));
    }
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_two_node_graph() {
        let doc = br#"<?xml version="1.0"?>
<gxl><graph id="g1" edgemode="undirected">
  <node id="_0"><attr name="x"><float>0.5</float></attr><attr name="y"><float>1.5</float></attr></node>
  <node id="_1"><attr name="x"><float>2.0</float></attr><attr name="y"><float>0.0</float></attr></node>
  <edge from="_0" to="_1"/>
</graph></gxl>"#;
        let g = parse_gxl(doc, "test.gxl").unwrap();
        assert_eq!(g.id(), "g1");
        assert_eq!(g.order(), 2);
        assert_eq!(g.size(), 1);
        assert_eq!(g.vertex(0), &LabelValue::RealVector(vec![0.5, 1.5]));
    }

    #[test]
    fn dangling_edge_names_the_node() {
        let doc = br#"<gxl><graph id="g">
  <node id="_0"><attr name="x"><float>0</float></attr></node>
  <edge from="_0" to="_9"/>
</graph></gxl>"#;
        let e = parse_gxl(doc, "bad.gxl").unwrap_err();
        let msg = e.to_string();
        assert!(msg.contains("_9"), "{msg}");
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn single_string_attribute_becomes_symbol() {
        let doc = br#"<gxl><graph id="g">
  <node id="a"><attr name="symbol"><string>C</string></attr></node>
</graph></gxl>"#;
        let g = parse_gxl(doc, "t.gxl").unwrap();
        assert_eq!(g.vertex(0), &LabelValue::Symbol("C".into()));
    }

    #[test]
    fn mixed_attributes_become_composite() {
        let doc = br#"<gxl><graph id="g">
  <node id="a">
    <attr name="symbol"><string>N</string></attr>
    <attr name="charge"><int>1</int></attr>
  </node>
</graph></gxl>"#;
        let g = parse_gxl(doc, "t.gxl").unwrap();
        match g.vertex(0) {
            LabelValue::Composite(subs) => {
                assert_eq!(subs.len(), 2);
                assert_eq!(subs["symbol"], LabelValue::Symbol("N".into()));
                assert_eq!(subs["charge"], LabelValue::RealVector(vec![1.0]));
            }
            other => panic!("expected composite, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_attribute_type_is_rejected() {
        let doc = br#"<gxl><graph id="g">
  <node id="a"><attr name="flag"><bool>true</bool></attr></node>
</graph></gxl>"#;
        let e = parse_gxl(doc, "t.gxl").unwrap_err();
        assert!(e.to_string().contains("unsupported element `bool`"), "{e}");
    }

    #[test]
    fn directed_graphs_are_rejected() {
        let doc = br#"<gxl><graph id="g" edgemode="directed">
  <node id="a"/>
</graph></gxl>"#;
        assert!(parse_gxl(doc, "t.gxl").is_err());
    }

    #[test]
    fn labeled_edges_round_through() {
        let doc = br#"<gxl><graph id="g">
  <node id="a"><attr name="x"><float>0</float></attr></node>
  <node id="b"><attr name="x"><float>1</float></attr></node>
  <edge from="a" to="b"><attr name="valence"><int>2</int></attr></edge>
</graph></gxl>"#;
        let g = parse_gxl(doc, "t.gxl").unwrap();
        assert_eq!(
            g.edges()[0].label,
            Some(LabelValue::RealVector(vec![2.0]))
        );
    }

    #[test]
    fn malformed_xml_reports_line() {
        let doc = b"<gxl><graph id=\"g\">\n<node id=\"a\">\n</graph>";
        let e = parse_gxl(doc, "broken.gxl").unwrap_err();
        assert!(matches!(e, OdseError::Parse { .. }), "{e}");
    }

    #[test]
    fn cxl_collection_lists_prints() {
        let doc = br#"<?xml version="1.0"?>
<GraphCollection><fingerprints base="x" count="2">
  <print file="a.gxl" class="A"/>
  <print file="b.gxl" class="B"/>
</fingerprints></GraphCollection>"#;
        let entries = parse_cxl(doc, "train.cxl").unwrap();
        assert_eq!(
            entries,
            vec![
                ("a.gxl".to_string(), "A".to_string()),
                ("b.gxl".to_string(), "B".to_string())
            ]
        );
    }
}
