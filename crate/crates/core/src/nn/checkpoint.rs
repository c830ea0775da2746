//! `CAPN` checkpoint container.
//!
//! Layout (little-endian): magic `CAPN`, format version `u32`, task tag `u8`,
//! tensor count `u32`, then per tensor a `u16`-prefixed UTF-8 name, rank `u8`,
//! one `u32` per dimension and the raw `f32` values.

use std::collections::HashMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::io::{put_f32s, put_string_u16, ByteReader};
use crate::nn::batchnorm::BatchNorm;
use crate::nn::conv::Conv2d;
use crate::nn::dense::Dense;
use crate::nn::network::{NetworkSpec, NetworkState, Task, CONV_FILTERS};
use crate::nn::tensor::Shape;

pub const MAGIC: &[u8; 4] = b"CAPN";
pub const VERSION: u32 = 1;

const INPUT_SHAPE: &str = "input.shape";

struct NamedTensor {
    name: String,
    dims: Vec<usize>,
    values: Vec<f32>,
}

fn collect(state: &NetworkState<f32>) -> Vec<NamedTensor> {
    let input = state.spec().input;
    let mut out = vec![NamedTensor {
        name: INPUT_SHAPE.into(),
        dims: vec![3],
        values: vec![input.height as f32, input.width as f32, input.channels as f32],
    }];
    let info = state.param_info();
    for (i, p) in info.iter().zip(state.params()) {
        out.push(NamedTensor {
            name: i.name.clone(),
            dims: i.dims.clone(),
            values: p.to_vec(),
        });
    }
    for (n, bn) in state.norms.iter().enumerate() {
        for (suffix, v) in [("running_mean", &bn.running_mean), ("running_var", &bn.running_var)] {
            out.push(NamedTensor {
                name: format!("bn{}.{suffix}", n + 1),
                dims: vec![v.len()],
                values: v.clone(),
            });
        }
    }
    for (i, v) in info.iter().zip(state.velocity.slices()) {
        out.push(NamedTensor {
            name: format!("{}.velocity", i.name),
            dims: i.dims.clone(),
            values: v.to_vec(),
        });
    }
    out
}

pub fn encode_checkpoint(state: &NetworkState<f32>) -> Result<Vec<u8>> {
    let tensors = collect(state);
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(state.spec().task.tag());
    out.extend_from_slice(&(tensors.len() as u32).to_le_bytes());
    for t in &tensors {
        put_string_u16(&mut out, &t.name, "tensor name")?;
        out.push(t.dims.len() as u8);
        for &d in &t.dims {
            out.extend_from_slice(&(d as u32).to_le_bytes());
        }
        put_f32s(&mut out, &t.values);
    }
    Ok(out)
}

pub fn write_checkpoint<W: Write>(state: &NetworkState<f32>, mut sink: W) -> Result<()> {
    sink.write_all(&encode_checkpoint(state)?)?;
    Ok(())
}

pub fn read_checkpoint(bytes: &[u8]) -> Result<NetworkState<f32>> {
    let mut r = ByteReader::new(bytes);
    if r.take(4, "magic")? != MAGIC {
        return Err(Error::Format("not a CAPN checkpoint (bad magic)".into()));
    }
    let version = r.u32("version")?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let tag = r.u8("task tag")?;
    let task = Task::from_tag(tag).ok_or_else(|| Error::Format(format!("unknown task tag {tag}")))?;
    let count = r.u32("tensor count")?;
    let mut tensors: HashMap<String, (Vec<usize>, Vec<f32>)> = HashMap::new();
    for _ in 0..count {
        let name = r.string_u16("tensor name")?;
        let rank = r.u8("tensor rank")? as usize;
        let dims = (0..rank)
            .map(|_| r.u32("tensor dims").map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let len = dims
            .iter()
            .try_fold(1usize, |a, &d| a.checked_mul(d))
            .ok_or_else(|| Error::Format(format!("tensor `{name}` is too large")))?;
        let values = r.f32s(len, &name)?;
        tensors.insert(name, (dims, values));
    }
    if r.remaining() != 0 {
        return Err(Error::Format(format!(
            "{} trailing bytes after checkpoint",
            r.remaining()
        )));
    }

    let mut take = |name: &str| -> Result<Vec<f32>> {
        tensors
            .remove(name)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::Format(format!("checkpoint is missing tensor `{name}`")))
    };

    let shape = take(INPUT_SHAPE)?;
    if shape.len() != 3 {
        return Err(Error::Format("input shape tensor must hold 3 values".into()));
    }
    let spec = NetworkSpec::with_input(
        task,
        Shape::new(shape[0] as usize, shape[1] as usize, shape[2] as usize),
    )
    .map_err(|e| Error::Format(e.to_string()))?;

    let mut convs = Vec::with_capacity(3);
    let mut norms = Vec::with_capacity(3);
    for (i, &cout) in CONV_FILTERS.iter().enumerate() {
        let n = i + 1;
        let cin = spec.stage_input(i).channels;
        convs.push(Conv2d::from_parts(
            cin,
            cout,
            take(&format!("conv{n}.kernels"))?,
            take(&format!("conv{n}.biases"))?,
        )?);
        let mut bn = BatchNorm::new(cout);
        bn.gamma = take(&format!("bn{n}.gamma"))?;
        bn.beta = take(&format!("bn{n}.beta"))?;
        bn.running_mean = take(&format!("bn{n}.running_mean"))?;
        bn.running_var = take(&format!("bn{n}.running_var"))?;
        if [&bn.gamma, &bn.beta, &bn.running_mean, &bn.running_var]
            .iter()
            .any(|v| v.len() != cout)
        {
            return Err(Error::Format(format!(
                "batch norm {n} tensors must have {cout} entries"
            )));
        }
        norms.push(bn);
    }
    let flat = spec.flat_units();
    let widths = [flat, flat, flat, spec.num_classes()];
    let mut dense = Vec::with_capacity(3);
    for i in 0..3 {
        let base = if i == 2 {
            "output".to_string()
        } else {
            format!("dense{}", i + 1)
        };
        dense.push(Dense::from_parts(
            widths[i],
            widths[i + 1],
            take(&format!("{base}.weights"))?,
            take(&format!("{base}.biases"))?,
        )?);
    }

    let mut state = NetworkState::from_layers(
        spec,
        convs.try_into().unwrap(),
        norms.try_into().unwrap(),
        dense.try_into().unwrap(),
    );
    let names: Vec<String> = state.param_info().into_iter().map(|i| i.name).collect();
    for (name, slot) in names.iter().zip(state.velocity.slices_mut()) {
        let v = take(&format!("{name}.velocity"))?;
        if v.len() != slot.len() {
            return Err(Error::Format(format!("velocity for `{name}` has the wrong length")));
        }
        slot.copy_from_slice(&v);
    }
    if let Some(extra) = tensors.keys().next() {
        return Err(Error::Format(format!("unexpected tensor `{extra}` in checkpoint")));
    }
    Ok(state)
}
