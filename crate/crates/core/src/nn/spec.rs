//! Declarative model architectures and their text form.
//!
//! A [`ModelSpec`] is an input shape plus a list of nodes in topological
//! order. Node ids start at 1; id 0 is the input. The last node is the output
//! and must be a one-unit linear dense layer.
//!
//! # Architecture files
//!
//! ```text
//! # comments and blank lines are ignored
//! format = chiomega-arch/1
//! input = 50x50x1
//! node.1 = conv2d name=conv1 filters=512 kernel=3x3 stride=1x1 activation=leaky_relu(0.3) from=0
//! node.2 = maxpool2d name=pool1 pool=2 from=1
//! node.3 = flatten name=flat from=2
//! node.4 = dense name=out units=1 activation=linear from=3
//! ```
//!
//! Layer kinds and their keys: `dense` (`units`, `activation`), `conv2d`
//! (`filters`, `kernel`, `stride`, `activation`), `maxpool2d` (`pool`),
//! `flatten`, `concat`, `activation` (`activation`). Every node has `name`
//! and `from` (comma-separated input ids). Activations are `linear`, `relu`
//! and `leaky_relu(α)`. Convolutions use no padding; pooling windows do not
//! overlap.

use std::fmt;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::NnError;

pub const ARCH_FORMAT: &str = "chiomega-arch/1";

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Activation {
    Linear,
    Relu,
    /// Leaky ReLU with negative slope `α`.
    LeakyRelu(f64),
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Activation::Linear => f.write_str("linear"),
            Activation::Relu => f.write_str("relu"),
            Activation::LeakyRelu(a) => write!(f, "leaky_relu({a})"),
        }
    }
}

impl Activation {
    fn parse(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(Activation::Linear),
            "relu" => Ok(Activation::Relu),
            _ => {
                let alpha = s
                    .strip_prefix("leaky_relu(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("unknown activation '{s}'"))?;
                let a: f64 = alpha.parse().map_err(|_| format!("bad leaky_relu slope '{alpha}'"))?;
                if !a.is_finite() {
                    return Err(format!("bad leaky_relu slope '{alpha}'"));
                }
                Ok(Activation::LeakyRelu(a))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerSpec {
    Dense {
        units: usize,
        activation: Activation,
    },
    Conv2d {
        filters: usize,
        kernel: (usize, usize),
        stride: (usize, usize),
        activation: Activation,
    },
    /// Non-overlapping `pool × pool` max pooling.
    MaxPool2d {
        pool: usize,
    },
    Flatten,
    Concat,
    Activation(Activation),
}

impl LayerSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            LayerSpec::Dense { .. } => "dense",
            LayerSpec::Conv2d { .. } => "conv2d",
            LayerSpec::MaxPool2d { .. } => "maxpool2d",
            LayerSpec::Flatten => "flatten",
            LayerSpec::Concat => "concat",
            LayerSpec::Activation(_) => "activation",
        }
    }

    pub fn activation(&self) -> Option<Activation> {
        match self {
            LayerSpec::Dense { activation, .. } | LayerSpec::Conv2d { activation, .. } => Some(*activation),
            LayerSpec::Activation(a) => Some(*a),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub name: String,
    pub layer: LayerSpec,
    pub inputs: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub input: Vec<usize>,
    pub nodes: Vec<Node>,
}

impl ModelSpec {
    pub fn new(input: &[usize]) -> Self {
        ModelSpec {
            input: input.to_vec(),
            nodes: Vec::new(),
        }
    }

    /// Appends a node and returns its id.
    pub fn add(&mut self, name: impl Into<String>, layer: LayerSpec, inputs: &[usize]) -> usize {
        self.nodes.push(Node {
            name: name.into(),
            layer,
            inputs: inputs.to_vec(),
        });
        self.nodes.len()
    }

    /// Id of the most recently added node (0 when there is none).
    pub fn last(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, id: usize) -> &Node {
        &self.nodes[id - 1]
    }

    pub fn input_len(&self) -> usize {
        self.input.iter().product()
    }

    /// Output shape of every node, index 0 being the input. Fails on the
    /// first node whose input does not fit, or on a malformed graph.
    pub fn shape_plan(&self) -> Result<Vec<Vec<usize>>, NnError> {
        if self.input.is_empty() || self.input.len() > 3 || self.input.contains(&0) {
            return Err(NnError::InvalidModel(format!("input shape {:?} must have 1 to 3 positive dims", self.input)));
        }
        if self.nodes.is_empty() {
            return Err(NnError::InvalidModel("model has no layers".into()));
        }
        let mut shapes = vec![self.input.clone()];
        let mut consumed = vec![false; self.nodes.len() + 1];
        for (i, node) in self.nodes.iter().enumerate() {
            let id = i + 1;
            let err = |message: String| NnError::Shape {
                node: id,
                name: node.name.clone(),
                message,
            };
            if node.inputs.is_empty() || node.inputs.iter().any(|&j| j >= id) {
                return Err(err(format!("inputs {:?} must be earlier node ids", node.inputs)));
            }
            let arity_ok = match node.layer {
                LayerSpec::Concat => node.inputs.len() >= 2,
                _ => node.inputs.len() == 1,
            };
            if !arity_ok {
                return Err(err(format!("{} cannot take {} inputs", node.layer.kind(), node.inputs.len())));
            }
            for &j in &node.inputs {
                consumed[j] = true;
            }
            let inp = &shapes[node.inputs[0]];
            let out = match &node.layer {
                LayerSpec::Dense { units, .. } => {
                    if *units == 0 {
                        return Err(err("units must be at least 1".into()));
                    }
                    if inp.len() != 1 {
                        return Err(err(format!("dense needs a flat input, got {inp:?}")));
                    }
                    vec![*units]
                }
                LayerSpec::Conv2d {
                    filters, kernel, stride, ..
                } => {
                    if *filters == 0 || kernel.0 == 0 || kernel.1 == 0 || stride.0 == 0 || stride.1 == 0 {
                        return Err(err("filters, kernel and stride must be at least 1".into()));
                    }
                    if inp.len() != 3 {
                        return Err(err(format!("conv2d needs an HxWxC input, got {inp:?}")));
                    }
                    if inp[0] < kernel.0 || inp[1] < kernel.1 {
                        return Err(err(format!(
                            "kernel {}x{} does not fit input {}x{}",
                            kernel.0, kernel.1, inp[0], inp[1]
                        )));
                    }
                    vec![
                        (inp[0] - kernel.0) / stride.0 + 1,
                        (inp[1] - kernel.1) / stride.1 + 1,
                        *filters,
                    ]
                }
                LayerSpec::MaxPool2d { pool } => {
                    if *pool == 0 {
                        return Err(err("pool must be at least 1".into()));
                    }
                    if inp.len() != 3 {
                        return Err(err(format!("maxpool2d needs an HxWxC input, got {inp:?}")));
                    }
                    if inp[0] < *pool || inp[1] < *pool {
                        return Err(err(format!("pool {pool} does not fit input {}x{}", inp[0], inp[1])));
                    }
                    vec![inp[0] / pool, inp[1] / pool, inp[2]]
                }
                LayerSpec::Flatten => vec![inp.iter().product()],
                LayerSpec::Concat => {
                    let mut total = 0;
                    for &j in &node.inputs {
                        if shapes[j].len() != 1 {
                            return Err(err(format!("concat needs flat inputs, node {j} is {:?}", shapes[j])));
                        }
                        total += shapes[j][0];
                    }
                    vec![total]
                }
                LayerSpec::Activation(_) => inp.clone(),
            };
            shapes.push(out);
        }
        let last = self.nodes.len();
        if let Some(dangling) = (1..last).find(|&id| !consumed[id]) {
            return Err(NnError::InvalidModel(format!(
                "node {dangling} ({}) is not consumed; the last node must be the only output",
                self.node(dangling).name
            )));
        }
        match self.node(last).layer {
            LayerSpec::Dense {
                units: 1,
                activation: Activation::Linear,
            } => {}
            _ => {
                return Err(NnError::InvalidModel(
                    "output node must be a dense layer with 1 unit and linear activation".into(),
                ))
            }
        }
        Ok(shapes)
    }

    /// Shapes of the trainable tensors in declaration order: for every dense
    /// or conv node, its weights then its bias.
    pub fn param_shapes(&self) -> Result<Vec<Vec<usize>>, NnError> {
        let plan = self.shape_plan()?;
        let mut out = Vec::new();
        for node in &self.nodes {
            let inp = &plan[node.inputs[0]];
            match node.layer {
                LayerSpec::Dense { units, .. } => {
                    out.push(vec![inp[0], units]);
                    out.push(vec![units]);
                }
                LayerSpec::Conv2d { filters, kernel, .. } => {
                    out.push(vec![kernel.0, kernel.1, inp[2], filters]);
                    out.push(vec![filters]);
                }
                _ => {}
            }
        }
        Ok(out)
    }

    pub fn param_count(&self) -> Result<usize, NnError> {
        Ok(self.param_shapes()?.iter().map(|s| s.iter().product::<usize>()).sum())
    }

    /// Canonical architecture file text.
    pub fn to_arch_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "format = {ARCH_FORMAT}");
        let _ = writeln!(out, "input = {}", dims(&self.input));
        for (i, node) in self.nodes.iter().enumerate() {
            let _ = write!(out, "node.{} = {} name={}", i + 1, node.layer.kind(), node.name);
            match &node.layer {
                LayerSpec::Dense { units, activation } => {
                    let _ = write!(out, " units={units} activation={activation}");
                }
                LayerSpec::Conv2d {
                    filters,
                    kernel,
                    stride,
                    activation,
                } => {
                    let _ = write!(
                        out,
                        " filters={filters} kernel={}x{} stride={}x{} activation={activation}",
                        kernel.0, kernel.1, stride.0, stride.1
                    );
                }
                LayerSpec::MaxPool2d { pool } => {
                    let _ = write!(out, " pool={pool}");
                }
                LayerSpec::Activation(a) => {
                    let _ = write!(out, " activation={a}");
                }
                LayerSpec::Flatten | LayerSpec::Concat => {}
            }
            let from: Vec<String> = node.inputs.iter().map(usize::to_string).collect();
            let _ = writeln!(out, " from={}", from.join(","));
        }
        out
    }

    pub fn from_arch_text(text: &str) -> Result<Self, NnError> {
        let mut format_seen = false;
        let mut input: Option<Vec<usize>> = None;
        let mut nodes: Vec<Node> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line_no = lineno + 1;
            let fail = |message: String| NnError::ArchParse { line: line_no, message };
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| fail("expected 'key = value'".into()))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "format" => {
                    if value != ARCH_FORMAT {
                        return Err(fail(format!("unsupported format '{value}'")));
                    }
                    format_seen = true;
                }
                "input" => input = Some(parse_dims(value).map_err(fail)?),
                _ => {
                    let id: usize = key
                        .strip_prefix("node.")
                        .and_then(|n| n.parse().ok())
                        .ok_or_else(|| fail(format!("unknown key '{key}'")))?;
                    if id != nodes.len() + 1 {
                        return Err(fail(format!("expected node.{}, found node.{id}", nodes.len() + 1)));
                    }
                    nodes.push(parse_node(value).map_err(fail)?);
                }
            }
        }
        if !format_seen {
            return Err(NnError::ArchParse {
                line: 0,
                message: "missing 'format' line".into(),
            });
        }
        let input = input.ok_or(NnError::ArchParse {
            line: 0,
            message: "missing 'input' line".into(),
        })?;
        Ok(ModelSpec { input, nodes })
    }

    /// Stable 64-bit identity of the architecture: the first eight bytes
    /// (little-endian) of the SHA-256 of its canonical text.
    pub fn spec_hash(&self) -> u64 {
        let digest = Sha256::digest(self.to_arch_text().as_bytes());
        u64::from_le_bytes(digest[..8].try_into().expect("8 bytes"))
    }

    /// Human-readable layer table with output shapes and parameter counts.
    pub fn summary(&self) -> Result<String, NnError> {
        let plan = self.shape_plan()?;
        let mut out = String::new();
        let _ = writeln!(out, "input {}", dims(&self.input));
        for (i, node) in self.nodes.iter().enumerate() {
            let id = i + 1;
            let inp = &plan[node.inputs[0]];
            let params = match node.layer {
                LayerSpec::Dense { units, .. } => inp[0] * units + units,
                LayerSpec::Conv2d { filters, kernel, .. } => kernel.0 * kernel.1 * inp[2] * filters + filters,
                _ => 0,
            };
            let from: Vec<String> = node.inputs.iter().map(usize::to_string).collect();
            let detail = match &node.layer {
                LayerSpec::Dense { units, activation } => format!("units={units} {activation}"),
                LayerSpec::Conv2d {
                    filters,
                    kernel,
                    stride,
                    activation,
                } => format!(
                    "filters={filters} kernel={}x{} stride={}x{} {activation}",
                    kernel.0, kernel.1, stride.0, stride.1
                ),
                LayerSpec::MaxPool2d { pool } => format!("pool={pool}"),
                LayerSpec::Activation(a) => a.to_string(),
                LayerSpec::Flatten | LayerSpec::Concat => String::new(),
            };
            let _ = writeln!(
                out,
                "{id} {} {} {} from={} -> {} params={params}",
                node.name,
                node.layer.kind(),
                detail,
                from.join(","),
                dims(&plan[id])
            );
        }
        let _ = writeln!(out, "total params={}", self.param_count()?);
        Ok(out)
    }
}

fn dims(shape: &[usize]) -> String {
    shape.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
}

fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    s.split('x')
        .map(|d| d.trim().parse::<usize>().map_err(|_| format!("bad dimension list '{s}'")))
        .collect()
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    match parse_dims(s)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(format!("expected AxB, got '{s}'")),
    }
}

fn parse_node(value: &str) -> Result<Node, String> {
    let mut parts = value.split_whitespace();
    let kind = parts.next().ok_or("missing layer kind")?;
    let mut fields: Vec<(&str, &str)> = Vec::new();
    for p in parts {
        let (k, v) = p.split_once('=').ok_or_else(|| format!("expected key=value, got '{p}'"))?;
        if fields.iter().any(|(seen, _)| *seen == k) {
            return Err(format!("duplicate key '{k}'"));
        }
        fields.push((k, v));
    }
    let mut used = 0usize;
    let mut get = |k: &str| -> Result<&str, String> {
        let v = fields
            .iter()
            .find(|(key, _)| *key == k)
            .map(|(_, v)| *v)
            .ok_or_else(|| format!("{kind}: missing '{k}'"))?;
        used += 1;
        Ok(v)
    };
    let count = |v: &str| v.parse::<usize>().map_err(|_| format!("bad count '{v}'"));
    let name = get("name")?.to_string();
    let inputs = get("from")?
        .split(',')
        .map(|s| s.parse::<usize>().map_err(|_| format!("bad input id '{s}'")))
        .collect::<Result<Vec<_>, _>>()?;
    let layer = match kind {
        "dense" => LayerSpec::Dense {
            units: count(get("units")?)?,
            activation: Activation::parse(get("activation")?)?,
        },
        "conv2d" => LayerSpec::Conv2d {
            filters: count(get("filters")?)?,
            kernel: parse_pair(get("kernel")?)?,
            stride: parse_pair(get("stride")?)?,
            activation: Activation::parse(get("activation")?)?,
        },
        "maxpool2d" => LayerSpec::MaxPool2d {
            pool: count(get("pool")?)?,
        },
        "flatten" => LayerSpec::Flatten,
        "concat" => LayerSpec::Concat,
        "activation" => LayerSpec::Activation(Activation::parse(get("activation")?)?),
        other => return Err(format!("unknown layer kind '{other}'")),
    };
    if used != fields.len() {
        return Err(format!("{kind}: unexpected keys in '{value}'"));
    }
    Ok(Node { name, layer, inputs })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn leaky() -> Activation {
        Activation::LeakyRelu(0.3)
    }

    fn small_cnn(order: usize) -> ModelSpec {
        let mut m = ModelSpec::new(&[order, order, 1]);
        let c = m.add(
            "conv",
            LayerSpec::Conv2d {
                filters: 4,
                kernel: (3, 3),
                stride: (1, 1),
                activation: leaky(),
            },
            &[0],
        );
        let p = m.add("pool", LayerSpec::MaxPool2d { pool: 2 }, &[c]);
        let f = m.add("flat", LayerSpec::Flatten, &[p]);
        m.add(
            "out",
            LayerSpec::Dense {
                units: 1,
                activation: Activation::Linear,
            },
            &[f],
        );
        m
    }

    #[test]
    fn valid_convolution_arithmetic() {
        let mut m = ModelSpec::new(&[50, 50, 1]);
        let a = m.add(
            "a",
            LayerSpec::Conv2d {
                filters: 512,
                kernel: (3, 3),
                stride: (1, 1),
                activation: leaky(),
            },
            &[0],
        );
        let b = m.add("b", LayerSpec::MaxPool2d { pool: 2 }, &[a]);
        let c = m.add(
            "c",
            LayerSpec::Conv2d {
                filters: 7,
                kernel: (5, 5),
                stride: (5, 5),
                activation: leaky(),
            },
            &[0],
        );
        let fb = m.add("fb", LayerSpec::Flatten, &[b]);
        let fc = m.add("fc", LayerSpec::Flatten, &[c]);
        let cat = m.add("cat", LayerSpec::Concat, &[fb, fc]);
        m.add(
            "out",
            LayerSpec::Dense {
                units: 1,
                activation: Activation::Linear,
            },
            &[cat],
        );
        let plan = m.shape_plan().unwrap();
        assert_eq!(plan[a], vec![48, 48, 512]);
        assert_eq!(plan[b], vec![24, 24, 512]);
        assert_eq!(plan[c], vec![10, 10, 7]);
        assert_eq!(plan[cat], vec![24 * 24 * 512 + 700]);
    }

    #[test]
    fn shape_errors_name_the_layer() {
        match small_cnn(3).shape_plan() {
            Err(NnError::Shape { node, name, .. }) => {
                assert_eq!(node, 2);
                assert_eq!(name, "pool");
            }
            other => panic!("expected shape error, got {other:?}"),
        }
        let mut dangling = small_cnn(8);
        dangling.nodes[3].inputs = vec![1];
        dangling.nodes[3].layer = LayerSpec::Flatten;
        dangling.add(
            "out2",
            LayerSpec::Dense {
                units: 1,
                activation: Activation::Linear,
            },
            &[4],
        );
        assert!(matches!(dangling.shape_plan(), Err(NnError::InvalidModel(_))));

        let mut bad_out = small_cnn(8);
        bad_out.nodes[3].layer = LayerSpec::Dense {
            units: 2,
            activation: Activation::Linear,
        };
        assert!(matches!(bad_out.shape_plan(), Err(NnError::InvalidModel(_))));
    }

    #[test]
    fn arch_text_round_trips() {
        let m = small_cnn(10);
        let text = m.to_arch_text();
        assert_eq!(
            text.lines().nth(2).unwrap(),
            "node.1 = conv2d name=conv filters=4 kernel=3x3 stride=1x1 activation=leaky_relu(0.3) from=0"
        );
        let back = ModelSpec::from_arch_text(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.spec_hash(), m.spec_hash());
        assert_ne!(small_cnn(11).spec_hash(), m.spec_hash());
    }

    #[test]
    fn arch_parse_errors() {
        assert!(ModelSpec::from_arch_text("input = 4\n").is_err());
        let text = "format = chiomega-arch/1\ninput = 4\nnode.2 = flatten name=f from=0\n";
        assert!(matches!(ModelSpec::from_arch_text(text), Err(NnError::ArchParse { line: 3, .. })));
        let text = "format = chiomega-arch/1\ninput = 4\nnode.1 = dense name=o units=1 activation=tanh from=0\n";
        assert!(ModelSpec::from_arch_text(text).is_err());
        let text = "format = chiomega-arch/1\ninput = 4\nnode.1 = dense name=o units=1 activation=linear from=0 extra=1\n";
        assert!(ModelSpec::from_arch_text(text).is_err());
    }

    #[test]
    fn param_shapes_in_declaration_order() {
        let m = small_cnn(8);
        assert_eq!(
            m.param_shapes().unwrap(),
            vec![vec![3, 3, 1, 4], vec![4], vec![3 * 3 * 4, 1], vec![1]]
        );
    }
}
