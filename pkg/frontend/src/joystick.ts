// Virtual joystick: screen displacement -> velocity command.
// Linear mapping with a 5% radial dead-zone; up is forward, a push to the
// right commands a clockwise (negative) yaw rate.

export interface JoystickLimits {
  vMax: number;
  wMax: number;
}

export interface JoystickCommand {
  v_x: number;
  w_z: number;
}

export const DEAD_ZONE = 0.05;

export function joystickToCommand(
  dx: number,
  dy: number,
  radius: number,
  limits: JoystickLimits,
  deadZone: number = DEAD_ZONE,
): JoystickCommand {
  if (radius <= 0) throw new Error("radius must be positive");
  let nx = dx / radius;
  let ny = -dy / radius; // screen y grows downward
  const mag = Math.hypot(nx, ny);
  if (mag < deadZone) return { v_x: 0, w_z: 0 };
  if (mag > 1) {
    nx /= mag;
    ny /= mag;
  }
  return {
    v_x: ny * limits.vMax,
    w_z: -nx * limits.wMax,
  };
}
