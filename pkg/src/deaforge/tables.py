"""Delimited-text rendering shared by the CLI and the validation report.

All numbers are written with 9 significant digits and ``\\n`` line endings so
that output is byte-stable for fixed inputs.
"""

import io


def fmt(x):
    return f"{float(x):.9g}"


def render_csv(header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(v if isinstance(v, str) else fmt(v) for v in row) + "\n")
    return buf.getvalue()


def render_voltage_csv(curve):
    return render_csv(("u_v", "displacement_m", "blocking_force_n"), curve.rows())


def render_freq_csv(points):
    return render_csv(("f_hz", "amplitude_m"), points)


def render_payload_csv(table):
    return render_csv(("payload_kg", "speed_mps"), table)


def render_speed_freq_csv(table):
    return render_csv(("f_hz", "speed_mps"), table)
