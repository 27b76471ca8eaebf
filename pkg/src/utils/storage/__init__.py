from .scene import (
    MANIFEST_NAME,
    ChannelKind,
    MaskEncoding,
    ChannelSpec,
    SceneManifest,
    SceneBundle,
    read_manifest,
    load_scene,
    write_scene,
    add_mask_channel,
)
from .activations import load_activations, save_activations
from .heads import HEAD_FORMAT_VERSION, head_to_dict, head_from_dict, save_head, load_head
from .reports import (
    CURVE_COLUMNS,
    write_json,
    write_curve_csv,
    plot_curves_svg,
    plot_reliability_svg,
    comparison_table,
)
